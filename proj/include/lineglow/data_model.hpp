#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lineglow/grid.hpp"

namespace lineglow {

/// An ordered vertex sequence. Coordinates are in data units until mapped by GridTransform.
struct Polyline {
  int id = 0;
  std::vector<Vec2> vertices;
  std::optional<int> cluster;
};

/// Affine letterbox fit of the dataset bounding box into the pixel grid.
/// Data y grows upward, grid rows grow downward, so the y axis is flipped.
struct GridTransform {
  double scale = 1.0;
  double offset_x = 0.0;  // grid x of data x = x_min
  double offset_y = 0.0;  // grid row of data y = y_max
  double x_min = 0.0;
  double y_max = 0.0;

  Vec2 apply(Vec2 p) const { return {offset_x + scale * (p.x - x_min), offset_y + scale * (y_max - p.y)}; }
};

struct Dataset {
  std::vector<Polyline> lines;  // data units
  GridTransform transform;
  int width = 0;
  int height = 0;
  std::vector<std::string> warnings;

  /// Lines mapped into grid coordinates.
  std::vector<Polyline> grid_lines() const;
  /// Sorted distinct cluster labels present in the data.
  std::vector<int> clusters() const;
};

enum class InputFormat { csv, json };

class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Default margin: 2% of the shorter grid side.
inline constexpr double kDefaultMargin = 0.02;

/// Parses `line_id,x,y[,cluster]` CSV (rows grouped by line) or a JSON array of
/// {id, cluster?, points:[[x,y],...]} and letterboxes it into a grid_w×grid_h grid.
Dataset ingest(const std::filesystem::path& path, InputFormat format, int grid_w, int grid_h,
               double margin = kDefaultMargin);
Dataset ingest_text(const std::string& text, InputFormat format, int grid_w, int grid_h,
                    double margin = kDefaultMargin);

/// Builds a dataset from lines already cleaned or synthesized in data units.
Dataset fit_to_grid(std::vector<Polyline> lines, int grid_w, int grid_h, double margin = kDefaultMargin);

/// Wraps lines that are already in grid coordinates (identity transform).
Dataset dataset_in_grid_space(std::vector<Polyline> grid_lines, int grid_w, int grid_h);

/// Removes consecutive duplicate vertices. Returns false when fewer than two distinct remain.
bool clean_vertices(Polyline& line);

InputFormat format_from_path(const std::filesystem::path& path);

struct RasterizedLine {
  int line_id = 0;
  std::optional<int> cluster;
  int width = 0;
  int height = 0;
  std::vector<Pixel> pixels;    // 8-connected chain, each pixel listed once
  std::vector<Vec2> tangents;   // parallel to pixels
  std::vector<double> weights;  // parallel to pixels: sum of 1/|segment walk| over segments through the pixel
  std::vector<Pixel> footprint; // kernel_n×kernel_n dilation of pixels, sorted row-major

  bool empty() const { return pixels.empty(); }
};

/// Integer line walk over a polyline given in grid coordinates. Pixels outside the
/// grid are dropped; a pixel hit by several segments keeps the first segment's tangent.
/// Each segment carries unit density mass spread over its full walk, so clipped segments keep
/// their per-pixel weight.
RasterizedLine rasterize(const Polyline& grid_line, int kernel_n, int width, int height);

/// Pixels of a single segment between rounded endpoints, in walk order from a to b.
std::vector<Pixel> walk_segment(Vec2 a, Vec2 b);

std::vector<RasterizedLine> rasterize_all(const std::vector<Polyline>& grid_lines, int kernel_n, int width,
                                          int height);

// ---------------------------------------------------------------------------
// Render parameters

enum class ColormapKind { multi_hue, single_hue_per_cluster };
enum class LightingMode { adaptive, fixed_global, per_cluster_manual };
enum class ShadingSpace { luminance_only, direct_rgb_baseline };
enum class BaselineVariant { full, scaled };
enum class DensityScale { log, linear };

/// Manual light for one cluster. The azimuth must stay inside
/// [center - half_width, center + half_width] (degrees, wrapping).
struct ClusterLight {
  double azimuth_deg = 135.0;
  double elevation_deg = 60.0;
  double center_deg = 135.0;
  double half_width_deg = 180.0;

  friend bool operator==(const ClusterLight&, const ClusterLight&) = default;
};

inline constexpr double kAdaptiveElevationDeg = 60.0;
inline constexpr double kDefaultAzimuthDeg = 135.0;

struct RenderParams {
  double mu = 0.5;
  double sigma = 0.5;
  double eta = 3.0;
  std::optional<double> eta_high;  // defaults to eta
  double phi = -20.0;
  int kernel_n = 3;
  double bandwidth_h = 1.0;
  std::optional<int> band_radius;  // defaults to max(5, ceil(3h))
  ColormapKind colormap = ColormapKind::multi_hue;
  DensityScale density_scale = DensityScale::log;
  LightingMode lighting = LightingMode::adaptive;
  double global_azimuth_deg = kDefaultAzimuthDeg;
  double global_elevation_deg = kAdaptiveElevationDeg;
  ShadingSpace shading = ShadingSpace::luminance_only;
  BaselineVariant baseline = BaselineVariant::full;
  std::map<int, ClusterLight> cluster_lights;

  double effective_eta_high() const { return eta_high.value_or(eta); }
  int effective_band_radius() const;

  friend bool operator==(const RenderParams&, const RenderParams&) = default;
};

struct ParamError {
  std::string field;
  std::string message;
};

/// First violated constraint, if any.
std::optional<ParamError> validate(const RenderParams& params);

/// Clamps mu and sigma into [0,1].
void clamp_focus(RenderParams& params);

/// Signed angular offset of `angle` from `center`, in (-180, 180].
double angular_offset_deg(double angle, double center);
bool azimuth_in_sector(const ClusterLight& light);
/// Clamps the azimuth onto the sector arc.
double clamp_to_sector(double azimuth_deg, double center_deg, double half_width_deg);

}  // namespace lineglow
