#include "lineglow/data_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace lineglow {

namespace {

bool parse_double(std::string_view s, double& out) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_int(std::string_view s, int& out) {
  double d = 0.0;
  if (!parse_double(s, d)) return false;
  if (d != std::floor(d) || d < std::numeric_limits<int>::min() || d > std::numeric_limits<int>::max()) return false;
  out = static_cast<int>(d);
  return true;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      fields.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return fields;
}

std::vector<Polyline> parse_csv(const std::string& text) {
  std::vector<Polyline> lines;
  std::unordered_set<int> closed;
  std::istringstream in(text);
  std::string raw;
  int row = 0;
  while (std::getline(in, raw)) {
    ++row;
    std::string_view line(raw);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    const auto fields = split_csv(line);
    int id = 0;
    if (row == 1 && !parse_int(fields[0], id)) continue;  // header
    if (fields.size() < 3 || fields.size() > 4) {
      throw IngestError("row " + std::to_string(row) + ": expected 3 or 4 fields, got " +
                        std::to_string(fields.size()));
    }
    Vec2 v;
    if (!parse_int(fields[0], id)) throw IngestError("row " + std::to_string(row) + ": bad line_id");
    if (!parse_double(fields[1], v.x)) throw IngestError("row " + std::to_string(row) + ": bad x");
    if (!parse_double(fields[2], v.y)) throw IngestError("row " + std::to_string(row) + ": bad y");
    std::optional<int> cluster;
    if (fields.size() == 4) {
      int c = 0;
      if (!parse_int(fields[3], c) || c < 0) throw IngestError("row " + std::to_string(row) + ": bad cluster");
      cluster = c;
    }
    if (lines.empty() || lines.back().id != id) {
      if (closed.contains(id)) {
        throw IngestError("row " + std::to_string(row) + ": rows of line " + std::to_string(id) +
                          " are not contiguous");
      }
      if (!lines.empty()) closed.insert(lines.back().id);
      lines.push_back(Polyline{id, {}, cluster});
    } else if (lines.back().cluster != cluster) {
      throw IngestError("row " + std::to_string(row) + ": cluster label changes within line " +
                        std::to_string(id));
    }
    lines.back().vertices.push_back(v);
  }
  return lines;
}

std::vector<Polyline> parse_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IngestError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw IngestError("JSON dataset must be an array of lines");
  std::vector<Polyline> lines;
  std::size_t row = 0;
  for (const auto& item : doc) {
    ++row;
    const std::string where = "entry " + std::to_string(row);
    if (!item.is_object() || !item.contains("id") || !item["id"].is_number_integer() || !item.contains("points") ||
        !item["points"].is_array()) {
      throw IngestError(where + ": expected {id, cluster?, points}");
    }
    Polyline line;
    line.id = item["id"].get<int>();
    if (item.contains("cluster") && !item["cluster"].is_null()) {
      if (!item["cluster"].is_number_integer() || item["cluster"].get<int>() < 0) {
        throw IngestError(where + ": bad cluster");
      }
      line.cluster = item["cluster"].get<int>();
    }
    for (const auto& pt : item["points"]) {
      if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number()) {
        throw IngestError(where + ": points must be [x, y] pairs");
      }
      Vec2 v{pt[0].get<double>(), pt[1].get<double>()};
      if (!std::isfinite(v.x) || !std::isfinite(v.y)) throw IngestError(where + ": non-finite coordinate");
      line.vertices.push_back(v);
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

// Walks from p0 to p1 with p0 having the smaller major coordinate.
std::vector<Pixel> walk_canonical(Pixel p0, Pixel p1, bool x_major) {
  std::vector<Pixel> out;
  if (x_major) {
    const std::int64_t dx = p1.col - p0.col;
    const std::int64_t dy = p1.row - p0.row;
    out.reserve(static_cast<std::size_t>(dx) + 1);
    for (std::int64_t k = 0; k <= dx; ++k) {
      const std::int64_t num = 2 * (static_cast<std::int64_t>(p0.row) * dx + k * dy) + dx;
      out.push_back({static_cast<int>(p0.col + k), static_cast<int>(dx == 0 ? p0.row : floor_div(num, 2 * dx))});
    }
  } else {
    const std::int64_t dy = p1.row - p0.row;
    const std::int64_t dx = p1.col - p0.col;
    out.reserve(static_cast<std::size_t>(dy) + 1);
    for (std::int64_t k = 0; k <= dy; ++k) {
      const std::int64_t num = 2 * (static_cast<std::int64_t>(p0.col) * dy + k * dx) + dy;
      out.push_back({static_cast<int>(dy == 0 ? p0.col : floor_div(num, 2 * dy)), static_cast<int>(p0.row + k)});
    }
  }
  return out;
}

}  // namespace

bool clean_vertices(Polyline& line) {
  std::vector<Vec2> kept;
  kept.reserve(line.vertices.size());
  for (const auto& v : line.vertices) {
    if (kept.empty() || !(kept.back() == v)) kept.push_back(v);
  }
  line.vertices = std::move(kept);
  return line.vertices.size() >= 2;
}

InputFormat format_from_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".json") return InputFormat::json;
  return InputFormat::csv;
}

Dataset fit_to_grid(std::vector<Polyline> lines, int grid_w, int grid_h, double margin) {
  if (grid_w < 16 || grid_h < 16) throw IngestError("grid must be at least 16x16");
  if (!(margin >= 0.0 && margin < 0.5)) throw IngestError("margin must lie in [0, 0.5)");
  Dataset ds;
  ds.width = grid_w;
  ds.height = grid_h;
  std::unordered_set<int> ids;
  for (auto& line : lines) {
    if (!ids.insert(line.id).second) throw IngestError("duplicate line id " + std::to_string(line.id));
    if (!clean_vertices(line)) {
      ds.warnings.push_back("line " + std::to_string(line.id) + " dropped: fewer than 2 distinct vertices");
      continue;
    }
    ds.lines.push_back(std::move(line));
  }
  if (ds.lines.empty()) throw IngestError("dataset is empty");

  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  for (const auto& line : ds.lines) {
    for (const auto& v : line.vertices) {
      x_min = std::min(x_min, v.x);
      x_max = std::max(x_max, v.x);
      y_min = std::min(y_min, v.y);
      y_max = std::max(y_max, v.y);
    }
  }
  const double m = margin * std::min(grid_w, grid_h);
  const double avail_w = grid_w - 1 - 2 * m;
  const double avail_h = grid_h - 1 - 2 * m;
  const double dx = x_max - x_min;
  const double dy = y_max - y_min;
  const double sx = dx > 0 ? avail_w / dx : std::numeric_limits<double>::infinity();
  const double sy = dy > 0 ? avail_h / dy : std::numeric_limits<double>::infinity();
  GridTransform t;
  t.scale = std::min(sx, sy);
  t.x_min = x_min;
  t.y_max = y_max;
  t.offset_x = m + (avail_w - t.scale * dx) / 2.0;
  t.offset_y = m + (avail_h - t.scale * dy) / 2.0;
  ds.transform = t;
  return ds;
}

Dataset dataset_in_grid_space(std::vector<Polyline> grid_lines, int grid_w, int grid_h) {
  Dataset ds;
  ds.width = grid_w;
  ds.height = grid_h;
  std::unordered_set<int> ids;
  for (auto& line : grid_lines) {
    if (!ids.insert(line.id).second) throw IngestError("duplicate line id " + std::to_string(line.id));
    if (!clean_vertices(line)) {
      ds.warnings.push_back("line " + std::to_string(line.id) + " dropped: fewer than 2 distinct vertices");
      continue;
    }
    // Store rows as data y = -row so the flipping transform maps them back unchanged.
    for (auto& v : line.vertices) v.y = -v.y;
    ds.lines.push_back(std::move(line));
  }
  if (ds.lines.empty()) throw IngestError("dataset is empty");
  ds.transform = GridTransform{1.0, 0.0, 0.0, 0.0, 0.0};
  return ds;
}

std::vector<Polyline> Dataset::grid_lines() const {
  std::vector<Polyline> out = lines;
  for (auto& line : out) {
    for (auto& v : line.vertices) v = transform.apply(v);
  }
  return out;
}

std::vector<int> Dataset::clusters() const {
  std::set<int> s;
  for (const auto& line : lines) {
    if (line.cluster) s.insert(*line.cluster);
  }
  return {s.begin(), s.end()};
}

Dataset ingest_text(const std::string& text, InputFormat format, int grid_w, int grid_h, double margin) {
  auto lines = format == InputFormat::csv ? parse_csv(text) : parse_json(text);
  return fit_to_grid(std::move(lines), grid_w, grid_h, margin);
}

Dataset ingest(const std::filesystem::path& path, InputFormat format, int grid_w, int grid_h, double margin) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ingest_text(ss.str(), format, grid_w, grid_h, margin);
}

std::vector<Pixel> walk_segment(Vec2 a, Vec2 b) {
  const Pixel p0{round_half_up(a.x), round_half_up(a.y)};
  const Pixel p1{round_half_up(b.x), round_half_up(b.y)};
  const bool x_major = std::abs(p1.col - p0.col) >= std::abs(p1.row - p0.row);
  const bool reversed = x_major ? p1.col < p0.col : p1.row < p0.row;
  auto out = reversed ? walk_canonical(p1, p0, x_major) : walk_canonical(p0, p1, x_major);
  if (reversed) std::reverse(out.begin(), out.end());
  return out;
}

RasterizedLine rasterize(const Polyline& grid_line, int kernel_n, int width, int height) {
  if (kernel_n < 1 || kernel_n % 2 == 0) throw std::invalid_argument("kernel_n must be odd and >= 1");
  RasterizedLine out;
  out.line_id = grid_line.id;
  out.cluster = grid_line.cluster;
  out.width = width;
  out.height = height;
  std::unordered_map<std::int64_t, std::size_t> seen;
  for (std::size_t s = 0; s + 1 < grid_line.vertices.size(); ++s) {
    const Vec2 a = grid_line.vertices[s];
    const Vec2 b = grid_line.vertices[s + 1];
    const Vec2 d = b - a;
    const double len = norm(d);
    if (len == 0.0) continue;
    const Vec2 tangent{d.x / len, d.y / len};
    const auto walk = walk_segment(a, b);
    const double w = 1.0 / static_cast<double>(walk.size());
    for (const Pixel& p : walk) {
      if (p.col < 0 || p.row < 0 || p.col >= width || p.row >= height) continue;
      const std::int64_t key = static_cast<std::int64_t>(p.row) * width + p.col;
      const auto [it, fresh] = seen.try_emplace(key, out.pixels.size());
      if (!fresh) {
        out.weights[it->second] += w;
        continue;
      }
      out.pixels.push_back(p);
      out.tangents.push_back(tangent);
      out.weights.push_back(w);
    }
  }
  const int r = kernel_n / 2;
  std::vector<std::int64_t> keys;
  keys.reserve(out.pixels.size() * kernel_n * kernel_n);
  for (const Pixel& p : out.pixels) {
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) {
        const int c = p.col + dx, rr = p.row + dy;
        if (c < 0 || rr < 0 || c >= width || rr >= height) continue;
        keys.push_back(static_cast<std::int64_t>(rr) * width + c);
      }
    }
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  out.footprint.reserve(keys.size());
  for (auto k : keys) out.footprint.push_back({static_cast<int>(k % width), static_cast<int>(k / width)});
  return out;
}

std::vector<RasterizedLine> rasterize_all(const std::vector<Polyline>& grid_lines, int kernel_n, int width,
                                          int height) {
  std::vector<RasterizedLine> out;
  out.reserve(grid_lines.size());
  for (const auto& line : grid_lines) out.push_back(rasterize(line, kernel_n, width, height));
  return out;
}

// ---------------------------------------------------------------------------

int RenderParams::effective_band_radius() const {
  if (band_radius) return *band_radius;
  return std::max(5, static_cast<int>(std::ceil(3.0 * bandwidth_h)));
}

std::optional<ParamError> validate(const RenderParams& p) {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(p.mu)) return ParamError{"mu", "must lie in [0, 1]"};
  if (!in_unit(p.sigma)) return ParamError{"sigma", "must lie in [0, 1]"};
  if (!(p.eta > 0.0) || !std::isfinite(p.eta)) return ParamError{"eta", "must be > 0"};
  if (p.eta_high && (!(*p.eta_high > 0.0) || !std::isfinite(*p.eta_high))) {
    return ParamError{"eta_high", "must be > 0"};
  }
  if (!(p.phi <= 0.0) || !std::isfinite(p.phi)) return ParamError{"phi", "must be <= 0"};
  if (p.kernel_n < 1 || p.kernel_n % 2 == 0 || p.kernel_n > 31) {
    return ParamError{"kernel", "must be an odd integer in [1, 31]"};
  }
  if (!(p.bandwidth_h > 0.0) || !std::isfinite(p.bandwidth_h) || p.bandwidth_h > 50.0) {
    return ParamError{"bandwidth", "must lie in (0, 50]"};
  }
  if (p.band_radius && (*p.band_radius < 1 || *p.band_radius > 200)) {
    return ParamError{"band_radius", "must lie in [1, 200]"};
  }
  if (!std::isfinite(p.global_azimuth_deg)) return ParamError{"azimuth", "must be finite"};
  if (!(p.global_elevation_deg > 0.0 && p.global_elevation_deg <= 90.0)) {
    return ParamError{"elevation", "must lie in (0, 90]"};
  }
  for (const auto& [cluster, light] : p.cluster_lights) {
    const std::string f = "cluster_lights." + std::to_string(cluster);
    if (!(light.half_width_deg >= 0.0 && light.half_width_deg <= 180.0)) {
      return ParamError{f + ".sector", "half-width must lie in [0, 180]"};
    }
    if (!(light.elevation_deg > 0.0 && light.elevation_deg <= 90.0)) {
      return ParamError{f + ".elevation", "must lie in (0, 90]"};
    }
    if (!std::isfinite(light.azimuth_deg) || !std::isfinite(light.center_deg)) {
      return ParamError{f + ".azimuth", "must be finite"};
    }
    if (!azimuth_in_sector(light)) return ParamError{f + ".azimuth", "outside the permitted sector"};
  }
  return std::nullopt;
}

void clamp_focus(RenderParams& params) {
  params.mu = std::clamp(params.mu, 0.0, 1.0);
  params.sigma = std::clamp(params.sigma, 0.0, 1.0);
}

double angular_offset_deg(double angle, double center) {
  double d = std::fmod(angle - center, 360.0);
  if (d <= -180.0) d += 360.0;
  if (d > 180.0) d -= 360.0;
  return d;
}

bool azimuth_in_sector(const ClusterLight& light) {
  return std::abs(angular_offset_deg(light.azimuth_deg, light.center_deg)) <= light.half_width_deg + 1e-9;
}

double clamp_to_sector(double azimuth_deg, double center_deg, double half_width_deg) {
  const double off = angular_offset_deg(azimuth_deg, center_deg);
  return center_deg + std::clamp(off, -half_width_deg, half_width_deg);
}

}  // namespace lineglow
