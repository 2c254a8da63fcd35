#include "lineglow/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "lineglow/synthetic.hpp"

namespace lineglow {

double mean_delta_e(const ColorImage& reference, const ColorImage& other) {
  require_same_shape(reference.pixels, other.pixels, "mean_delta_e");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < reference.pixels.size(); ++i) {
    if (reference.empty[i]) continue;
    sum += ciede2000(reference.pixels[i], other.pixels[i]);
    ++n;
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

std::optional<double> threshold_crossing(const std::vector<double>& phis, const std::vector<double>& values,
                                         double threshold) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < threshold) continue;
    if (i == 0) return phis[0];
    const double u = (threshold - values[i - 1]) / (values[i] - values[i - 1]);
    return phis[i - 1] + u * (phis[i] - phis[i - 1]);
  }
  return std::nullopt;
}

FidelityReport fidelity_sweep(const Scene& scene, const RenderParams& params, const std::vector<double>& phis,
                              BaselineVariant variant, double threshold) {
  FidelityReport rep;
  rep.threshold = threshold;
  rep.phis = phis;
  RenderParams p = params;
  p.shading = ShadingSpace::luminance_only;
  const Frame frame = render(scene, p);
  RenderParams base_params = p;
  base_params.shading = ShadingSpace::direct_rgb_baseline;
  base_params.baseline = variant;
  const double baseline = mean_delta_e(frame.base, recompose(frame, base_params));
  for (double phi : phis) {
    p.phi = phi;
    rep.ours.push_back(mean_delta_e(frame.base, recompose(frame, p)));
    rep.baseline.push_back(baseline);
  }
  rep.crossing_phi = threshold_crossing(rep.phis, rep.ours, threshold);
  return rep;
}

std::string FidelityReport::to_csv() const {
  std::ostringstream os;
  os << "phi,ours,baseline\n";
  for (std::size_t i = 0; i < phis.size(); ++i) os << phis[i] << ',' << ours[i] << ',' << baseline[i] << '\n';
  return os.str();
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit needs two or more paired samples");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("linear_fit needs distinct x values");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of nothing");
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

std::optional<double> ScalingReport::outlierness_ratio(int count_a, int count_b) const {
  auto ia = std::find(counts.begin(), counts.end(), count_a);
  auto ib = std::find(counts.begin(), counts.end(), count_b);
  if (ia == counts.end() || ib == counts.end()) return std::nullopt;
  const double ta = seconds[static_cast<std::size_t>(ia - counts.begin())].outlierness;
  const double tb = seconds[static_cast<std::size_t>(ib - counts.begin())].outlierness;
  if (!(ta > 0.0)) return std::nullopt;
  return tb / ta;
}

std::string ScalingReport::to_csv() const {
  std::ostringstream os;
  os << "lines,outlierness_s,normal_map_s,lighting_s\n";
  for (std::size_t i = 0; i < counts.size(); ++i) {
    os << counts[i] << ',' << seconds[i].outlierness << ',' << seconds[i].normal_map << ',' << seconds[i].lighting
       << '\n';
  }
  return os.str();
}

ScalingReport bench_scaling(const std::vector<int>& counts, const BenchOptions& opt) {
  if (counts.size() < 2) throw std::invalid_argument("bench needs at least two counts");
  if (!std::is_sorted(counts.begin(), counts.end()) ||
      std::adjacent_find(counts.begin(), counts.end()) != counts.end() || counts.front() < 2) {
    throw std::invalid_argument("counts must be strictly increasing and at least 2");
  }
  if (opt.repeats < 3) throw std::invalid_argument("repeats must be at least 3");
  const auto generate = opt.generator ? opt.generator : synthetic::random_lines;
  const RenderParams& params = opt.params;
  const SceneKey key = SceneKey::from(params);
  ScalingReport rep;
  rep.counts = counts;
  // Scene state other than the timed stages is built once, outside the clock.
  std::vector<Scene> scenes;
  for (int count : counts) {
    const Dataset ds = dataset_in_grid_space(generate(count, opt.width, opt.height, opt.seed), opt.width, opt.height);
    Scene& scene = scenes.emplace_back();
    for (auto& l : rasterize_all(ds.grid_lines(), key.kernel_n, ds.width, ds.height)) {
      if (!l.empty()) scene.lines.push_back(std::move(l));
    }
    scene.width = ds.width;
    scene.height = ds.height;
    scene.key = key;
    scene.density = aggregate(scene.lines, key.bandwidth_h, key.band_radius);
    scene.clusters = Grid<std::int32_t>(ds.width, ds.height, -1);
  }

  // Repeats go round-robin over the counts so load drift hits every count alike.
  std::vector<std::vector<double>> t_out(counts.size()), t_norm(counts.size()), t_light(counts.size());
  for (int r = 0; r < opt.repeats; ++r) {
    for (std::size_t i = 0; i < scenes.size(); ++i) {
      Scene& scene = scenes[i];
      t_out[i].push_back(time_seconds([&] {
        auto fields = build_influence_fields(scene.lines, key.bandwidth_h,
                                             footprint_field_radius(key.kernel_n, key.band_radius));
        scene.index = outlierness_all(scene.lines, fields, key.band_radius);
        scene.fields = std::move(fields);
      }));
      NormalStage normals;
      t_norm[i].push_back(time_seconds([&] { normals = compute_normals(scene, params); }));
      t_light[i].push_back(time_seconds([&] {
        scene.moments = orientation_moments(scene.fields, scene.width, scene.height, key.band_radius);
        auto st = compute_lighting(scene, params, normals.structure);
        (void)st;
      }));
    }
  }
  for (std::size_t i = 0; i < counts.size(); ++i) {
    StageTimes st{median(t_out[i]), median(t_norm[i]), median(t_light[i])};
    rep.seconds.push_back(st);
    if (opt.progress) opt.progress(counts[i], st);
  }
  std::vector<double> x(counts.begin(), counts.end()), yo, yn, yl;
  for (const auto& s : rep.seconds) {
    yo.push_back(s.outlierness);
    yn.push_back(s.normal_map);
    yl.push_back(s.lighting);
  }
  rep.outlierness_fit = linear_fit(x, yo);
  rep.normal_map_fit = linear_fit(x, yn);
  rep.lighting_fit = linear_fit(x, yl);
  return rep;
}

}  // namespace lineglow
