#include "lineglow/lighting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lineglow/parallel.hpp"

namespace lineglow {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr int kSignSearchRadius = 16;

Vec2 sign_by_axes(Vec2 v) {
  if (v.x < 0.0 || (v.x == 0.0 && v.y < 0.0)) return -v;
  return v;
}

}  // namespace

std::optional<Vec2> dominant_orientation(const OrientationMoments& m) {
  if (!(m.weight > 0.0)) return std::nullopt;
  // Principal axis of [[xx, xy], [xy, yy]] in closed form.
  const double theta = 0.5 * std::atan2(2.0 * m.xy, m.xx - m.yy);
  Vec2 v{std::cos(theta), std::sin(theta)};
  const double eps = 1e-12 * m.weight;
  const double along = v.x * m.mx + v.y * m.my;
  if (std::abs(along) > eps) return along < 0.0 ? -v : v;
  // Mean perpendicular to the axis (mirrored tangents): sign by the side the mean lies on.
  // Unlike an axis rule this survives rotating the data.
  const double side = v.x * m.my - v.y * m.mx;
  if (std::abs(side) > eps) return side < 0.0 ? -v : v;
  return sign_by_axes(v);
}

std::optional<Vec2> dominant_orientation(std::span<const OrientationSample> samples) {
  OrientationMoments m;
  for (const auto& s : samples) m.add(s.tangent, s.weight);
  return dominant_orientation(m);
}

Grid<OrientationMoments> orientation_moments(const std::vector<InfluenceField>& fields, int width, int height,
                                             int band_radius) {
  Grid<OrientationMoments> out(width, height);
  const std::uint32_t r2 = static_cast<std::uint32_t>(band_radius) * band_radius;
  for (const auto& field : fields) {
    for (const BandCell& cell : field.cells()) {
      if (cell.d2 > r2) continue;
      out[cell.pixel].add(field.tangent(cell), field.value(cell));
    }
  }
  return out;
}

Vec3 light_from_angles(double azimuth_deg, double elevation_deg) {
  const double az = azimuth_deg * kDeg;
  const double el = elevation_deg * kDeg;
  return normalized(Vec3{std::cos(el) * std::cos(az), -std::cos(el) * std::sin(az), std::sin(el)});
}

Vec3 perpendicular_light(Vec2 dominant, double elevation_deg) {
  const Vec2 p = perp(dominant);
  const double el = elevation_deg * kDeg;
  return normalized(Vec3{std::cos(el) * p.x, std::cos(el) * p.y, std::sin(el)});
}

LightField light_field(const LightingInputs& in, const RenderParams& params) {
  if (!in.structure) throw std::invalid_argument("light_field: structure normals required");
  const int w = in.structure->width();
  const int h = in.structure->height();
  LightField out;
  out.mode = params.lighting;
  out.empty_light = light_from_angles(params.global_azimuth_deg, params.global_elevation_deg);
  out.directions = Grid<Vec3>(w, h, out.empty_light);
  out.dominant = Grid<Vec2>(w, h);
  out.dominant_defined = Grid<std::uint8_t>(w, h, 0);
  if (params.lighting == LightingMode::fixed_global) return out;

  if (!in.moments || !in.fields) throw std::invalid_argument("light_field: moments and fields required");
  require_same_shape(*in.moments, in.structure->normals, "light_field");
  if (params.lighting == LightingMode::per_cluster_manual && !in.clusters) {
    throw std::invalid_argument("light_field: manual mode needs a cluster map");
  }

  // Resolved manual lights per cluster.
  std::map<int, Vec3> manual;
  if (params.lighting == LightingMode::per_cluster_manual) {
    for (const auto& [cluster, cl] : params.cluster_lights) {
      manual[cluster] =
          light_from_angles(clamp_to_sector(cl.azimuth_deg, cl.center_deg, cl.half_width_deg), cl.elevation_deg);
    }
  }

  const int half = params.kernel_n / 2;
  const auto& moments = *in.moments;
  const auto& prov = in.structure->provenance;
  parallel_for(0, static_cast<std::size_t>(h), [&](std::size_t row_u) {
    const int row = static_cast<int>(row_u);
    for (int col = 0; col < w; ++col) {
      const std::size_t idx = prov.index(col, row);
      if (!manual.empty()) {
        const std::int32_t c = (*in.clusters)[idx];
        if (auto it = manual.find(c); c >= 0 && it != manual.end()) {
          out.directions[idx] = it->second;
          continue;
        }
      }
      std::optional<Vec2> d;
      const std::int32_t contributor = prov[idx];
      if (contributor >= 0) {
        const auto& field = (*in.fields)[static_cast<std::size_t>(contributor)];
        if (const BandCell* cell = field.find(static_cast<std::uint32_t>(idx))) d = field.tangent(*cell);
      }
      if (!d) {
        OrientationMoments acc;
        for (int dy = -half; dy <= half; ++dy) {
          for (int dx = -half; dx <= half; ++dx) {
            const int c = col + dx, r = row + dy;
            if (moments.contains(c, r)) acc += moments(c, r);
          }
        }
        // Exactly cancelling tangents leave the sign open. Take it from the mean over growing
        // square rings, which map onto themselves under quarter turns of the data.
        const double eps = 1e-12 * acc.weight;
        for (int ring = half + 1; ring <= kSignSearchRadius && std::hypot(acc.mx, acc.my) <= eps; ++ring) {
          for (int dy = -ring; dy <= ring; ++dy) {
            const int step = (dy == -ring || dy == ring) ? 1 : 2 * ring;
            for (int dx = -ring; dx <= ring; dx += step) {
              const int c = col + dx, r = row + dy;
              if (!moments.contains(c, r)) continue;
              acc.mx += moments(c, r).mx;
              acc.my += moments(c, r).my;
            }
          }
        }
        d = dominant_orientation(acc);
      }
      if (!d) continue;
      out.dominant[idx] = *d;
      out.dominant_defined[idx] = 1;
      out.directions[idx] = perpendicular_light(*d);
    }
  });
  return out;
}

IntensityMap intensity(const NormalGrid& structure, const LightField& lights) {
  require_same_shape(structure.normals, lights.directions, "intensity");
  IntensityMap out;
  out.grid = ScalarGrid(structure.width(), structure.height(), 0.0);
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < out.grid.size(); ++i) {
    const double v = std::clamp(dot(structure.normals[i], lights.directions[i]), -1.0, 1.0);
    out.grid[i] = v;
    lo = std::min(lo, v);
  }
  out.i_min = out.grid.size() ? lo : 0.0;
  out.i_empty = dot(Vec3{0.0, 0.0, 1.0}, lights.empty_light);
  return out;
}

}  // namespace lineglow
