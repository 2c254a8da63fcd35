// lineglow command-line entry point.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lineglow/chart.hpp"
#include "lineglow/image_io.hpp"
#include "lineglow/metrics.hpp"
#include "lineglow/pipeline.hpp"
#include "lineglow/service.hpp"
#include "lineglow/synthetic.hpp"

using namespace lineglow;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitPipeline = 1;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, sep)) out.push_back(part);
  return out;
}

double to_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError("bad number '" + s + "' in " + what);
  }
}

/// Render flags, all optional so that a --config file supplies the defaults.
struct ParamFlags {
  std::optional<double> mu, sigma, eta, eta_high, phi, bandwidth;
  std::optional<int> kernel, band_radius;
  std::optional<std::string> colormap, scale, lighting, shading, baseline;
  std::vector<std::string> lights;
  std::optional<std::string> config;

  void add_to(CLI::App& app) {
    app.add_option("--mu", mu, "outlier focus in [0,1]");
    app.add_option("--sigma", sigma, "structure emphasis in [0,1]");
    app.add_option("--eta", eta, "normal-map scale (> 0)");
    app.add_option("--eta-high", eta_high, "high-frequency normal scale (defaults to --eta)");
    app.add_option("--phi", phi, "illumination strength (<= 0)");
    app.add_option("--kernel", kernel, "odd kernel size n (n x n footprint)");
    app.add_option("--bandwidth", bandwidth, "Gaussian bandwidth h in pixels");
    app.add_option("--band-radius", band_radius, "influence band radius in pixels");
    app.add_option("--colormap", colormap, "multi or single")->check(CLI::IsMember({"multi", "single"}));
    app.add_option("--scale", scale, "density normalization")->check(CLI::IsMember({"log", "linear"}));
    app.add_option("--lighting", lighting, "adaptive, fixed:AZ:EL or manual");
    app.add_option("--light", lights, "manual light CLUSTER:AZ:EL[:CENTER:HALFWIDTH], repeatable");
    app.add_option("--shading", shading, "lab or rgb-baseline")->check(CLI::IsMember({"lab", "rgb-baseline"}));
    app.add_option("--baseline", baseline, "rgb-baseline variant")->check(CLI::IsMember({"full", "scaled"}));
    app.add_option("--config", config, "JSON file of parameter defaults")->check(CLI::ExistingFile);
  }

  RenderParams resolve() const {
    RenderParams p = config ? load_params_file(*config) : RenderParams{};
    nlohmann::json delta = nlohmann::json::object();
    if (mu) delta["mu"] = *mu;
    if (sigma) delta["sigma"] = *sigma;
    if (eta) delta["eta"] = *eta;
    if (eta_high) delta["eta_high"] = *eta_high;
    if (phi) delta["phi"] = *phi;
    if (kernel) delta["kernel"] = *kernel;
    if (bandwidth) delta["bandwidth"] = *bandwidth;
    if (band_radius) delta["band_radius"] = *band_radius;
    if (colormap) delta["colormap"] = *colormap;
    if (scale) delta["density_scale"] = *scale;
    if (shading) delta["shading"] = *shading;
    if (baseline) delta["baseline"] = *baseline;
    if (lighting) {
      const auto parts = split(*lighting, ':');
      if (parts.size() == 1 && (parts[0] == "adaptive" || parts[0] == "manual")) {
        delta["lighting"] = parts[0];
      } else if (parts.size() == 3 && parts[0] == "fixed") {
        delta["lighting"] = "fixed";
        delta["azimuth"] = to_number(parts[1], "--lighting");
        delta["elevation"] = to_number(parts[2], "--lighting");
      } else {
        throw UsageError("--lighting must be adaptive, manual or fixed:AZ:EL");
      }
    }
    if (!lights.empty()) {
      nlohmann::json cl = nlohmann::json::object();
      for (const auto& spec : lights) {
        const auto parts = split(spec, ':');
        if (parts.size() != 3 && parts.size() != 5) throw UsageError("--light must be CLUSTER:AZ:EL[:CENTER:HALFWIDTH]");
        nlohmann::json l{{"azimuth", to_number(parts[1], "--light")}, {"elevation", to_number(parts[2], "--light")}};
        if (parts.size() == 5) {
          l["center"] = to_number(parts[3], "--light");
          l["sector"] = to_number(parts[4], "--light");
        }
        cl[parts[0]] = l;
      }
      delta["cluster_lights"] = cl;
      if (!lighting) delta["lighting"] = "manual";
    }
    if (auto err = apply_params_json(p, delta)) throw UsageError("--" + err->field + ": " + err->message);
    return p;
  }
};

struct InputFlags {
  std::string input;
  int width = 512;
  int height = 512;
  double margin = kDefaultMargin;
  std::optional<std::string> clusters;

  void add_to(CLI::App& app, bool required = true) {
    auto* opt = app.add_option("--input", input, "dataset (.csv or .json)");
    if (required) opt->required();
    app.add_option("--width", width, "grid width in pixels")->check(CLI::Range(16, 16384));
    app.add_option("--height", height, "grid height in pixels")->check(CLI::Range(16, 16384));
    app.add_option("--margin", margin, "letterbox margin as a fraction of the shorter side");
    app.add_option("--clusters", clusters, "CSV of line_id,cluster overriding cluster labels")->check(CLI::ExistingFile);
  }

  Dataset load() const {
    Dataset ds = ingest(input, format_from_path(input), width, height, margin);
    if (clusters) apply_cluster_file(ds);
    for (const auto& w : ds.warnings) std::cerr << "warning: " << w << '\n';
    return ds;
  }

  void apply_cluster_file(Dataset& ds) const {
    std::ifstream in(*clusters);
    std::map<int, int> labels;
    std::string row;
    for (int n = 1; std::getline(in, row); ++n) {
      if (row.empty() || (n == 1 && row.find_first_of("0123456789-") != 0)) continue;  // header
      const auto parts = split(row, ',');
      if (parts.size() != 2) throw IngestError("clusters row " + std::to_string(n) + ": expected line_id,cluster");
      try {
        labels[std::stoi(parts[0])] = std::stoi(parts[1]);
      } catch (const std::exception&) {
        throw IngestError("clusters row " + std::to_string(n) + ": not an integer");
      }
    }
    for (auto& line : ds.lines) {
      if (auto it = labels.find(line.id); it != labels.end()) line.cluster = it->second;
    }
  }
};

void print_json_line(const nlohmann::json& j) { std::cout << j.dump() << std::endl; }

int cmd_render(const InputFlags& in, const ParamFlags& pf, const std::string& out,
               const std::optional<std::string>& colormap_file, const std::optional<std::string>& dump_normals,
               const std::optional<std::string>& dump_intensity, const std::optional<std::string>& dump_provenance,
               bool report_fidelity) {
  const RenderParams params = pf.resolve();
  const Dataset ds = in.load();
  std::optional<Colormap> custom;
  if (colormap_file) custom = Colormap::load_json(*colormap_file);
  const Scene scene = build_scene(ds, SceneKey::from(params));
  const Frame frame = render(scene, params, custom ? &*custom : nullptr);
  write_file(out, encode_png(frame.image));
  if (dump_normals) write_file(*dump_normals, encode_normals_png(frame.normals.structure));
  if (dump_intensity) write_file(*dump_intensity, encode_intensity_png(frame.lighting.intensity.grid));
  if (dump_provenance) write_file(*dump_provenance, encode_provenance_png(frame.normals.structure));

  std::size_t clamped = 0;
  for (auto v : frame.clamp_mask.values()) clamped += v;
  nlohmann::json summary{{"lines", scene.lines.size()},
                         {"f_max", scene.density.max_value()},
                         {"i_min", frame.lighting.intensity.i_min},
                         {"i_empty", frame.lighting.intensity.i_empty},
                         {"selected", frame.normals.selection.selected.size()},
                         {"non_empty_pixels", frame.base.non_empty_count()},
                         {"clamped_pixels", clamped}};
  if (report_fidelity) summary["mean_delta_e"] = mean_delta_e(frame.base, frame.image);
  print_json_line(summary);
  return 0;
}

int cmd_outlierness(const InputFlags& in, const ParamFlags& pf, const std::optional<std::string>& out) {
  const RenderParams params = pf.resolve();
  const Dataset ds = in.load();
  const SceneKey key = SceneKey::from(params);
  std::vector<RasterizedLine> lines;
  for (auto& l : rasterize_all(ds.grid_lines(), key.kernel_n, ds.width, ds.height)) {
    if (!l.empty()) lines.push_back(std::move(l));
  }
  const OutlierIndex index = outlierness_all(lines, key.bandwidth_h, key.band_radius);
  std::ostringstream os;
  os.precision(10);
  os << "line_id,score,rank,normalized\n";
  for (std::size_t i : index.order()) {
    os << index.line_ids[i] << ',' << index.scores[i] << ',' << index.ranks[i] << ',' << index.normalized[i] << '\n';
  }
  if (out) {
    std::ofstream f(*out);
    if (!f) throw std::runtime_error("cannot write " + *out);
    f << os.str();
  } else {
    std::cout << os.str();
  }
  return 0;
}

int cmd_bench(const std::vector<int>& counts, int repeats, int width, int height, std::uint64_t seed,
              const ParamFlags& pf, const std::optional<std::string>& csv, const std::optional<std::string>& png) {
  BenchOptions opt;
  opt.width = width;
  opt.height = height;
  opt.repeats = repeats;
  opt.seed = seed;
  opt.params = pf.resolve();
  opt.progress = [](int count, const StageTimes& t) {
    std::cerr << count << " lines: outlierness " << t.outlierness << " s, normal map " << t.normal_map
              << " s, lighting " << t.lighting << " s\n";
  };
  const ScalingReport rep = bench_scaling(counts, opt);
  if (csv) {
    std::ofstream f(*csv);
    f << rep.to_csv();
  } else {
    std::cout << rep.to_csv();
  }
  if (png) {
    std::vector<double> x(rep.counts.begin(), rep.counts.end()), yo, yn, yl;
    for (const auto& s : rep.seconds) yo.push_back(s.outlierness), yn.push_back(s.normal_map), yl.push_back(s.lighting);
    write_file(*png, encode_png(line_chart({{x, yo, {214, 39, 40}}, {x, yn, {31, 119, 180}}, {x, yl, {44, 160, 44}}})));
  }
  nlohmann::json summary{{"outlierness_r2", rep.outlierness_fit.r2},
                         {"normal_map_r2", rep.normal_map_fit.r2},
                         {"lighting_r2", rep.lighting_fit.r2},
                         {"outlierness_slope_s_per_line", rep.outlierness_fit.slope}};
  std::cerr << summary.dump() << '\n';
  return 0;
}

int cmd_fidelity(const InputFlags& in, bool synthetic_corridor, const ParamFlags& pf, const std::vector<double>& phis,
                 const std::optional<std::string>& csv, const std::optional<std::string>& png) {
  const RenderParams params = pf.resolve();
  const Dataset ds = synthetic_corridor
                         ? dataset_in_grid_space(synthetic::corridor_lines(synthetic::kCorridorLines, in.width, in.height, synthetic::kCorridorSeed), in.width, in.height)
                         : in.load();
  const Scene scene = build_scene(ds, SceneKey::from(params));
  const FidelityReport rep = fidelity_sweep(scene, params, phis, params.baseline);
  if (csv) {
    std::ofstream f(*csv);
    f << rep.to_csv();
  } else {
    std::cout << rep.to_csv();
  }
  if (png) {
    ChartOptions copt;
    copt.reference_y = rep.threshold;
    write_file(*png, encode_png(line_chart({{rep.phis, rep.ours, {31, 119, 180}},
                                            {rep.phis, rep.baseline, {214, 39, 40}, true}},
                                           copt)));
  }
  nlohmann::json summary{{"threshold", rep.threshold}};
  summary["crossing_phi"] = rep.crossing_phi ? nlohmann::json(*rep.crossing_phi) : nlohmann::json("never in range");
  std::cerr << summary.dump() << '\n';
  return 0;
}

int cmd_serve(const InputFlags& in, const ParamFlags& pf, const ServeOptions& sopt,
              const std::optional<std::string>& colormap_file) {
  const RenderParams params = pf.resolve();
  std::optional<Colormap> custom;
  if (colormap_file) custom = Colormap::load_json(*colormap_file);
  Session session(in.load(), params, custom);
  std::cerr << "serving on http://" << sopt.host << ':' << sopt.port << '\n';
  if (!serve(session, sopt)) {
    std::cerr << "error: cannot listen on " << sopt.host << ':' << sopt.port << '\n';
    return kExitPipeline;
  }
  return 0;
}

int cmd_synth(const std::string& kind, int count, int width, int height, std::uint64_t seed, const std::string& out) {
  std::vector<Polyline> lines;
  if (kind == "corridor") lines = synthetic::corridor_lines(count, width, height, seed);
  else if (kind == "random") lines = synthetic::random_lines(count, width, height, seed);
  else lines = synthetic::parallel_with_crosser(count, width, height);
  std::ofstream f(out);
  if (!f) throw std::runtime_error("cannot write " + out);
  f << synthetic::to_csv(lines);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lineglow: illuminated line density plots"};
  app.require_subcommand(1);

  // render
  auto* render_cmd = app.add_subcommand("render", "render an illuminated density plot to PNG");
  InputFlags r_in;
  ParamFlags r_pf;
  std::string r_out;
  std::optional<std::string> r_cmap, r_normals, r_intensity, r_prov;
  bool r_fidelity = false;
  r_in.add_to(*render_cmd);
  r_pf.add_to(*render_cmd);
  render_cmd->add_option("--out", r_out, "output PNG")->required();
  render_cmd->add_option("--colormap-file", r_cmap, "JSON colormap stops")->check(CLI::ExistingFile);
  render_cmd->add_option("--dump-normals", r_normals, "write the structural normal map as PNG");
  render_cmd->add_option("--dump-intensity", r_intensity, "write the intensity map as 16-bit PNG");
  render_cmd->add_option("--dump-provenance", r_prov, "write normal provenance as indexed PNG");
  render_cmd->add_flag("--report-fidelity", r_fidelity, "include mean CIEDE2000 vs. the unshaded plot");

  // outlierness
  auto* out_cmd = app.add_subcommand("outlierness", "write per-line outlierness as CSV");
  InputFlags o_in;
  ParamFlags o_pf;
  std::optional<std::string> o_out;
  o_in.add_to(*out_cmd);
  o_pf.add_to(*out_cmd);
  out_cmd->add_option("--out", o_out, "CSV path (stdout when omitted)");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "time pipeline stages over synthetic datasets");
  std::vector<int> b_counts{100, 500, 1000, 2000, 5000};
  int b_repeats = 3, b_width = 512, b_height = 512;
  std::uint64_t b_seed = 7;
  ParamFlags b_pf;
  std::optional<std::string> b_csv, b_png;
  bench_cmd->add_option("--counts", b_counts, "line counts")->delimiter(',');
  bench_cmd->add_option("--repeats", b_repeats, "repeats per count (median is reported)")->check(CLI::Range(3, 1000));
  bench_cmd->add_option("--width", b_width)->check(CLI::Range(16, 16384));
  bench_cmd->add_option("--height", b_height)->check(CLI::Range(16, 16384));
  bench_cmd->add_option("--seed", b_seed);
  bench_cmd->add_option("--csv", b_csv, "CSV output (stdout when omitted)");
  bench_cmd->add_option("--png", b_png, "chart output");
  b_pf.add_to(*bench_cmd);

  // fidelity
  auto* fid_cmd = app.add_subcommand("fidelity", "CIEDE2000 sweep over phi against the RGB baseline");
  InputFlags f_in;
  ParamFlags f_pf;
  bool f_synth = false;
  std::vector<double> f_phis{0, -5, -10, -15, -20, -25, -30, -35, -40};
  std::optional<std::string> f_csv, f_png;
  f_in.add_to(*fid_cmd, false);
  f_pf.add_to(*fid_cmd);
  fid_cmd->add_flag("--synthetic", f_synth, "use the built-in corridor dataset instead of --input");
  fid_cmd->add_option("--phis", f_phis, "phi values")->delimiter(',');
  fid_cmd->add_option("--csv", f_csv, "CSV output (stdout when omitted)");
  fid_cmd->add_option("--png", f_png, "chart output");

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "interactive HTTP service");
  InputFlags s_in;
  ParamFlags s_pf;
  ServeOptions s_opt;
  std::optional<std::string> s_ui, s_cmap;
  s_in.add_to(*serve_cmd);
  s_pf.add_to(*serve_cmd);
  serve_cmd->add_option("--port", s_opt.port)->check(CLI::Range(1, 65535));
  serve_cmd->add_option("--host", s_opt.host);
  serve_cmd->add_option("--ui-dir", s_ui, "static client assets served under /ui")->check(CLI::ExistingDirectory);
  serve_cmd->add_option("--colormap-file", s_cmap, "JSON colormap stops")->check(CLI::ExistingFile);

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic dataset as CSV");
  std::string y_kind = "corridor", y_out;
  int y_count = synthetic::kCorridorLines, y_width = synthetic::kCorridorSize, y_height = synthetic::kCorridorSize;
  std::uint64_t y_seed = 1;
  synth_cmd->add_option("--kind", y_kind)->check(CLI::IsMember({"corridor", "random", "crosser"}));
  synth_cmd->add_option("--count", y_count)->check(CLI::Range(1, 10000000));
  synth_cmd->add_option("--width", y_width)->check(CLI::Range(16, 16384));
  synth_cmd->add_option("--height", y_height)->check(CLI::Range(16, 16384));
  synth_cmd->add_option("--seed", y_seed);
  synth_cmd->add_option("--out", y_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (render_cmd->parsed()) return cmd_render(r_in, r_pf, r_out, r_cmap, r_normals, r_intensity, r_prov, r_fidelity);
    if (out_cmd->parsed()) return cmd_outlierness(o_in, o_pf, o_out);
    if (bench_cmd->parsed()) return cmd_bench(b_counts, b_repeats, b_width, b_height, b_seed, b_pf, b_csv, b_png);
    if (fid_cmd->parsed()) {
      if (!f_synth && f_in.input.empty()) throw UsageError("fidelity needs --input or --synthetic");
      return cmd_fidelity(f_in, f_synth, f_pf, f_phis, f_csv, f_png);
    }
    if (serve_cmd->parsed()) {
      if (s_ui) s_opt.ui_dir = *s_ui;
      return cmd_serve(s_in, s_pf, s_opt, s_cmap);
    }
    if (synth_cmd->parsed()) return cmd_synth(y_kind, y_count, y_width, y_height, y_seed, y_out);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPipeline;
  }
  return kExitUsage;
}
