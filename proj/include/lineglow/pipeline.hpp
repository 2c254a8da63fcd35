#pragma once

#include <optional>
#include <vector>

#include "lineglow/composition.hpp"
#include "lineglow/data_model.hpp"
#include "lineglow/density.hpp"
#include "lineglow/lighting.hpp"
#include "lineglow/outlierness.hpp"
#include "lineglow/structure_normals.hpp"

namespace lineglow {

/// Parameters that force the expensive scene state to be rebuilt.
struct SceneKey {
  int kernel_n = 3;
  double bandwidth_h = 1.0;
  int band_radius = 5;

  static SceneKey from(const RenderParams& p) { return {p.kernel_n, p.bandwidth_h, p.effective_band_radius()}; }
  friend bool operator==(const SceneKey&, const SceneKey&) = default;
};

/// Everything that depends only on the dataset and SceneKey: rasterized lines, influence
/// fields, density, the outlierness index, tangent moments and the per-pixel cluster map.
struct Scene {
  int width = 0;
  int height = 0;
  SceneKey key;
  std::vector<RasterizedLine> lines;  // lines with at least one pixel on the grid
  std::vector<InfluenceField> fields;
  DensityField density;
  OutlierIndex index;
  Grid<OrientationMoments> moments;
  Grid<std::int32_t> clusters;  // cluster with the largest density share, -1 for none
  std::vector<int> cluster_ids;
};

Scene build_scene(const Dataset& dataset, const SceneKey& key);

/// Per-pixel label of the cluster contributing the most density; ties go to the smaller label.
Grid<std::int32_t> dominant_cluster_map(const std::vector<RasterizedLine>& lines, double bandwidth_h,
                                        int band_radius, int width, int height);

struct NormalStage {
  Selection selection;
  NormalGrid low;
  NormalGrid high;
  NormalGrid structure;
};

NormalStage compute_normals(const Scene& scene, const RenderParams& params);

struct LightingStage {
  LightField light;
  IntensityMap intensity;
};

LightingStage compute_lighting(const Scene& scene, const RenderParams& params, const NormalGrid& structure,
                               const Grid<OrientationMoments>* moments = nullptr);

struct Frame {
  ColorImage base;   // unshaded density plot
  ColorImage image;  // composed result
  NormalStage normals;
  LightingStage lighting;
  ScalarGrid scaled_intensity;
  Grid<std::uint8_t> clamp_mask;
};

/// Colormap for the params: the custom map when given (multi-hue only), else the defaults.
Colormap colormap_for(const Scene& scene, const RenderParams& params, const Colormap* custom = nullptr);

/// Full render. Throws std::invalid_argument on invalid params or a scene built for another key.
Frame render(const Scene& scene, const RenderParams& params, const Colormap* custom = nullptr);

/// Composition only, reusing an existing frame's base and intensity (used by phi sweeps).
ColorImage recompose(const Frame& frame, const RenderParams& params, Grid<std::uint8_t>* clamp_mask = nullptr);

}  // namespace lineglow
