#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lineglow/color.hpp"
#include "lineglow/data_model.hpp"
#include "lineglow/density.hpp"
#include "lineglow/grid.hpp"
#include "lineglow/lighting.hpp"

namespace lineglow {

struct ColorImage {
  Grid<Rgb8> pixels;
  Grid<std::uint8_t> empty;  // 1 where no line contributes

  ColorImage() = default;
  ColorImage(int width, int height, Rgb8 fill = {255, 255, 255})
      : pixels(width, height, fill), empty(width, height, 1) {}

  int width() const { return pixels.width(); }
  int height() const { return pixels.height(); }
  std::size_t non_empty_count() const;

  friend bool operator==(const ColorImage&, const ColorImage&) = default;
};

inline constexpr Rgb8 kBackground{255, 255, 255};

struct ColorStop {
  double t = 0.0;
  Rgb8 color;
};

class ColormapError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Colormap {
  ColormapKind kind = ColormapKind::multi_hue;
  std::vector<ColorStop> stops;       // multi-hue lookup table
  std::map<int, double> cluster_hues; // single-hue: hue (degrees, polar LUV) per cluster
  DensityScale scale = DensityScale::log;

  /// Seven-stop perceptually ordered map following the viridis hue path, with lightness and
  /// chroma pulled inside sRGB far enough to absorb a 20-unit darkening of L.
  static Colormap default_multi_hue();
  /// The unmodified viridis samples at the same seven positions.
  static Colormap viridis();
  /// One hue per cluster from a fixed palette, in the order given.
  static Colormap single_hue(const std::vector<int>& clusters);
  /// Reads {"stops": [[t, [r, g, b]], ...], "scale": "log"|"linear"}.
  static Colormap load_json(const std::filesystem::path& path);

  /// Throws ColormapError when stops do not start at 0, end at 1 and increase.
  void validate() const;
  Rgb8 lookup(double t) const;
  double hue_for(int cluster) const;
};

/// Lightness/chroma ramp of the single-hue maps, t in [0,1] from sparse to dense.
Hcl single_hue_color(double hue, double t);

/// Normalized density t in [0,1]; log(1 + F) / log(1 + F_max) by default.
double normalize_density(double f, double f_max, DensityScale scale);

/// Maps density to color. `clusters` (per-pixel label, -1 for none) is required for single-hue maps.
ColorImage map_density(const DensityField& density, const Colormap& cmap,
                       const Grid<std::int32_t>* clusters = nullptr);

/// I' = phi * (I_empty - I) / (I_empty - I_min); all zeros when I_empty <= I_min.
ScalarGrid scale_intensity(const IntensityMap& intensity, double phi);

enum class CompositionSpace { lab_multi_hue, hcl_single_hue };

/// Adds I' to the lightness of every non-empty pixel, clamped to [0, 100], keeping the
/// chromatic coordinates. Pixels with I' == 0 are copied unchanged. When `clamp_mask` is given
/// it marks pixels whose result left the sRGB gamut (LAB) or had chroma reduced (HCL).
ColorImage compose_luminance(const ColorImage& base, const ScalarGrid& i_prime, CompositionSpace space,
                             Grid<std::uint8_t>* clamp_mask = nullptr);

/// Shading applied directly to sRGB channels: full multiplies by clamp(I, 0, 1), scaled uses
/// 0.5 + 0.5 * clamp(I, 0, 1). Empty pixels are untouched.
ColorImage baseline_rgb_lambert(const ColorImage& base, const IntensityMap& intensity,
                                BaselineVariant variant = BaselineVariant::full);

}  // namespace lineglow
