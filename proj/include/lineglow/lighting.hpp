#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lineglow/data_model.hpp"
#include "lineglow/grid.hpp"
#include "lineglow/outlierness.hpp"
#include "lineglow/structure_normals.hpp"

namespace lineglow {

struct OrientationSample {
  Vec2 tangent;
  double weight = 0.0;
};

/// Weighted second and first moments of tangent samples.
struct OrientationMoments {
  double xx = 0.0, xy = 0.0, yy = 0.0;  // sum w t t^T
  double mx = 0.0, my = 0.0;            // sum w t
  double weight = 0.0;

  void add(Vec2 t, double w) {
    xx += w * t.x * t.x;
    xy += w * t.x * t.y;
    yy += w * t.y * t.y;
    mx += w * t.x;
    my += w * t.y;
    weight += w;
  }
  OrientationMoments& operator+=(const OrientationMoments& o) {
    xx += o.xx, xy += o.xy, yy += o.yy, mx += o.mx, my += o.my, weight += o.weight;
    return *this;
  }
};

/// Principal eigenvector of the weighted orientation tensor, signed to agree with the
/// weighted mean tangent. A mean perpendicular to the axis picks the sign with
/// cross(v, mean) > 0; a vanishing mean falls back to x >= 0, then y >= 0.
/// Undefined when the total weight is zero.
std::optional<Vec2> dominant_orientation(const OrientationMoments& m);
std::optional<Vec2> dominant_orientation(std::span<const OrientationSample> samples);

/// Per-pixel moments of every line's band tangents weighted by its influence value.
Grid<OrientationMoments> orientation_moments(const std::vector<InfluenceField>& fields, int width, int height,
                                             int band_radius);

/// Light vector from an azimuth (degrees counter-clockwise from east, north at the top of the
/// image) and elevation, expressed in grid coordinates (x right, y down, z toward the viewer).
Vec3 light_from_angles(double azimuth_deg, double elevation_deg);

/// Light perpendicular to a dominant direction: +90 degree rotation lifted to `elevation_deg`.
Vec3 perpendicular_light(Vec2 dominant, double elevation_deg = kAdaptiveElevationDeg);

struct LightField {
  Grid<Vec3> directions;
  Grid<Vec2> dominant;
  Grid<std::uint8_t> dominant_defined;
  LightingMode mode = LightingMode::adaptive;
  Vec3 empty_light;  // light used where no orientation is available

  int width() const { return directions.width(); }
  int height() const { return directions.height(); }
};

/// Inputs shared by all lighting modes.
struct LightingInputs {
  const NormalGrid* structure = nullptr;              // provenance selects the contributor
  const std::vector<InfluenceField>* fields = nullptr;  // contributor tangents
  const Grid<OrientationMoments>* moments = nullptr;  // per-pixel tangent moments
  const Grid<std::int32_t>* clusters = nullptr;       // per-pixel cluster label, -1 for none
};

LightField light_field(const LightingInputs& inputs, const RenderParams& params);

struct IntensityMap {
  ScalarGrid grid;
  double i_empty = 0.0;
  double i_min = 0.0;
};

/// Lambertian intensity I = n . l.
IntensityMap intensity(const NormalGrid& structure, const LightField& lights);

}  // namespace lineglow
