#include "lineglow/composition.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "lineglow/parallel.hpp"

namespace lineglow {

std::size_t ColorImage::non_empty_count() const {
  return static_cast<std::size_t>(std::count(empty.values().begin(), empty.values().end(), std::uint8_t{0}));
}

Colormap Colormap::viridis() {
  Colormap m;
  m.kind = ColormapKind::multi_hue;
  m.stops = {{0.0, {68, 1, 84}},          {1.0 / 6.0, {68, 57, 131}}, {2.0 / 6.0, {49, 104, 142}},
             {3.0 / 6.0, {33, 145, 140}}, {4.0 / 6.0, {53, 183, 121}}, {5.0 / 6.0, {144, 215, 67}},
             {1.0, {253, 231, 37}}};
  return m;
}

Colormap Colormap::default_multi_hue() {
  // Viridis hues with lightness lifted to start at L = 25 and chroma capped so that every stop
  // can lose 20 units of L without leaving sRGB. Plain viridis hugs the gamut boundary, so a
  // darkening shift clips a/b on much of the map.
  Colormap m;
  m.kind = ColormapKind::multi_hue;
  m.stops = {{0.0, {82, 45, 90}},          {1.0 / 6.0, {90, 76, 153}},  {2.0 / 6.0, {70, 120, 158}},
             {3.0 / 6.0, {74, 156, 151}}, {4.0 / 6.0, {81, 190, 133}}, {5.0 / 6.0, {149, 219, 73}},
             {1.0, {252, 230, 78}}};
  return m;
}

Colormap Colormap::single_hue(const std::vector<int>& clusters) {
  static constexpr double kPalette[] = {255.0, 12.0, 128.0, 290.0, 60.0, 195.0, 330.0, 95.0};
  Colormap m;
  m.kind = ColormapKind::single_hue_per_cluster;
  std::size_t i = 0;
  for (int c : clusters) m.cluster_hues[c] = kPalette[i++ % std::size(kPalette)];
  return m;
}

Colormap Colormap::load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ColormapError("cannot open colormap " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ColormapError(std::string("invalid colormap JSON: ") + e.what());
  }
  // get<uint8_t> would silently wrap 300 to 44.
  auto channel = [](const nlohmann::json& v) {
    const int c = v.get<int>();
    if (c < 0 || c > 255) throw ColormapError("color channel outside 0..255");
    return static_cast<std::uint8_t>(c);
  };
  Colormap m;
  try {
    for (const auto& s : doc.at("stops")) {
      const auto& rgb = s.at(1);
      m.stops.push_back({s.at(0).get<double>(), Rgb8{channel(rgb.at(0)), channel(rgb.at(1)), channel(rgb.at(2))}});
    }
    if (doc.contains("scale")) {
      const auto s = doc["scale"].get<std::string>();
      if (s == "log") m.scale = DensityScale::log;
      else if (s == "linear") m.scale = DensityScale::linear;
      else throw ColormapError("scale must be log or linear");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ColormapError(std::string("malformed colormap: ") + e.what());
  }
  m.validate();
  return m;
}

void Colormap::validate() const {
  if (kind == ColormapKind::single_hue_per_cluster) return;
  if (stops.size() < 2) throw ColormapError("colormap needs at least two stops");
  if (stops.front().t != 0.0 || stops.back().t != 1.0) throw ColormapError("stops must cover t = 0 and t = 1");
  for (std::size_t i = 1; i < stops.size(); ++i) {
    if (!(stops[i].t > stops[i - 1].t)) throw ColormapError("stop positions must increase");
  }
}

Rgb8 Colormap::lookup(double t) const {
  t = std::clamp(t, 0.0, 1.0);
  auto hi = std::lower_bound(stops.begin(), stops.end(), t, [](const ColorStop& s, double v) { return s.t < v; });
  if (hi == stops.begin()) return hi->color;
  if (hi == stops.end()) return stops.back().color;
  if (hi->t == t) return hi->color;
  const auto lo = hi - 1;
  const double u = (t - lo->t) / (hi->t - lo->t);
  auto mix = [u](std::uint8_t a, std::uint8_t b) {
    return static_cast<std::uint8_t>(std::lround(a + u * (static_cast<double>(b) - a)));
  };
  return {mix(lo->color.r, hi->color.r), mix(lo->color.g, hi->color.g), mix(lo->color.b, hi->color.b)};
}

double Colormap::hue_for(int cluster) const {
  if (auto it = cluster_hues.find(cluster); it != cluster_hues.end()) return it->second;
  return 255.0;
}

Hcl single_hue_color(double hue, double t) {
  t = std::clamp(t, 0.0, 1.0);
  return {hue, 30.0 + 40.0 * t, 88.0 - 58.0 * t};
}

double normalize_density(double f, double f_max, DensityScale scale) {
  if (!(f_max > 0.0) || f <= 0.0) return 0.0;
  if (scale == DensityScale::linear) return std::clamp(f / f_max, 0.0, 1.0);
  return std::clamp(std::log1p(f) / std::log1p(f_max), 0.0, 1.0);
}

ColorImage map_density(const DensityField& density, const Colormap& cmap, const Grid<std::int32_t>* clusters) {
  const auto& f = density.grid;
  ColorImage out(f.width(), f.height(), kBackground);
  const bool single = cmap.kind == ColormapKind::single_hue_per_cluster;
  if (single && !clusters) throw ColormapError("single-hue colormap needs a cluster field");
  if (!single) cmap.validate();
  if (clusters) require_same_shape(*clusters, f, "map_density");
  const double f_max = density.max_value();
  if (!(f_max > 0.0)) return out;
  parallel_for(0, f.size(), [&](std::size_t i) {
    if (f[i] <= 0.0) return;
    out.empty[i] = 0;
    const double t = normalize_density(f[i], f_max, cmap.scale);
    if (single) {
      out.pixels[i] = to_rgb8(single_hue_color(cmap.hue_for((*clusters)[i]), t));
    } else {
      out.pixels[i] = cmap.lookup(t);
    }
  });
  return out;
}

ScalarGrid scale_intensity(const IntensityMap& intensity, double phi) {
  ScalarGrid out(intensity.grid.width(), intensity.grid.height(), 0.0);
  const double range = intensity.i_empty - intensity.i_min;
  if (!(range > 0.0) || phi == 0.0) return out;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = phi * (intensity.i_empty - intensity.grid[i]) / range;
  return out;
}

ColorImage compose_luminance(const ColorImage& base, const ScalarGrid& i_prime, CompositionSpace space,
                             Grid<std::uint8_t>* clamp_mask) {
  require_same_shape(base.pixels, i_prime, "compose_luminance");
  ColorImage out = base;
  if (clamp_mask) *clamp_mask = Grid<std::uint8_t>(base.width(), base.height(), 0);
  parallel_for(0, out.pixels.size(), [&](std::size_t i) {
    if (base.empty[i] || i_prime[i] == 0.0) return;
    bool clamped = false;
    if (space == CompositionSpace::lab_multi_hue) {
      Lab lab = to_lab(base.pixels[i]);
      const double shifted = lab.l + i_prime[i];
      lab.l = std::clamp(shifted, 0.0, 100.0);
      out.pixels[i] = to_rgb8(lab, &clamped);
      clamped = clamped || shifted != lab.l;
    } else {
      Hcl hcl = to_hcl(base.pixels[i]);
      const double shifted = hcl.l + i_prime[i];
      hcl.l = std::clamp(shifted, 0.0, 100.0);
      out.pixels[i] = to_rgb8(hcl, &clamped);
      clamped = clamped || shifted != hcl.l;
    }
    if (clamp_mask) (*clamp_mask)[i] = clamped ? 1 : 0;
  });
  return out;
}

ColorImage baseline_rgb_lambert(const ColorImage& base, const IntensityMap& intensity, BaselineVariant variant) {
  require_same_shape(base.pixels, intensity.grid, "baseline_rgb_lambert");
  ColorImage out = base;
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    if (base.empty[i]) continue;
    const double shade = std::clamp(intensity.grid[i], 0.0, 1.0);
    const double k = variant == BaselineVariant::full ? shade : 0.5 + 0.5 * shade;
    auto scale = [k](std::uint8_t c) { return static_cast<std::uint8_t>(std::lround(c * k)); };
    const Rgb8 p = base.pixels[i];
    out.pixels[i] = {scale(p.r), scale(p.g), scale(p.b)};
  }
  return out;
}

}  // namespace lineglow
