#include "lineglow/pipeline.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "lineglow/parallel.hpp"

namespace lineglow {

Grid<std::int32_t> dominant_cluster_map(const std::vector<RasterizedLine>& lines, double bandwidth_h,
                                        int band_radius, int width, int height) {
  Grid<std::int32_t> out(width, height, -1);
  std::map<int, ScalarGrid> per_cluster;
  for (const auto& line : lines) {
    if (!line.cluster) continue;
    auto [it, inserted] = per_cluster.try_emplace(*line.cluster, width, height, 0.0);
    accumulate(it->second, line_density(line, bandwidth_h, band_radius));
  }
  if (per_cluster.empty()) return out;
  Grid<double> best(width, height, 0.0);
  for (const auto& [cluster, field] : per_cluster) {  // ascending labels, strict > keeps the smaller on ties
    for (std::size_t i = 0; i < field.size(); ++i) {
      if (field[i] > best[i]) {
        best[i] = field[i];
        out[i] = cluster;
      }
    }
  }
  return out;
}

Scene build_scene(const Dataset& dataset, const SceneKey& key) {
  Scene s;
  s.width = dataset.width;
  s.height = dataset.height;
  s.key = key;
  for (auto& line : rasterize_all(dataset.grid_lines(), key.kernel_n, dataset.width, dataset.height)) {
    if (!line.empty()) s.lines.push_back(std::move(line));
  }
  if (s.lines.empty()) throw std::invalid_argument("no line intersects the grid");
  s.cluster_ids = dataset.clusters();

  s.density = aggregate(s.lines, key.bandwidth_h, key.band_radius);
  s.fields = build_influence_fields(s.lines, key.bandwidth_h, footprint_field_radius(key.kernel_n, key.band_radius));
  if (s.lines.size() >= 2) {
    s.index = outlierness_all(s.lines, s.fields, key.band_radius);
  } else {
    s.index.line_ids = {s.lines.front().line_id};
    s.index.scores = {1.0};
    s.index.neighbor_counts = {0};
    assign_ranks(s.index);
  }
  s.moments = orientation_moments(s.fields, s.width, s.height, key.band_radius);
  s.clusters = dominant_cluster_map(s.lines, key.bandwidth_h, key.band_radius, s.width, s.height);
  return s;
}

NormalStage compute_normals(const Scene& scene, const RenderParams& params) {
  NormalStage st;
  st.selection = select_lines(scene.index, params.mu, params.sigma);
  st.low = low_freq_normals(scene.density.grid, params.eta);
  st.high = high_freq_normals(st.selection, scene.lines, scene.fields, params.effective_eta_high());
  st.structure = compose(st.low, st.high);
  return st;
}

LightingStage compute_lighting(const Scene& scene, const RenderParams& params, const NormalGrid& structure,
                               const Grid<OrientationMoments>* moments) {
  LightingInputs in;
  in.structure = &structure;
  in.fields = &scene.fields;
  in.moments = moments ? moments : &scene.moments;
  in.clusters = &scene.clusters;
  LightingStage st;
  st.light = light_field(in, params);
  st.intensity = intensity(structure, st.light);
  return st;
}

Colormap colormap_for(const Scene& scene, const RenderParams& params, const Colormap* custom) {
  Colormap cmap;
  if (params.colormap == ColormapKind::single_hue_per_cluster) {
    cmap = custom && custom->kind == ColormapKind::single_hue_per_cluster ? *custom
                                                                          : Colormap::single_hue(scene.cluster_ids);
  } else {
    cmap = custom && custom->kind == ColormapKind::multi_hue ? *custom : Colormap::default_multi_hue();
  }
  cmap.scale = params.density_scale;
  return cmap;
}

Frame render(const Scene& scene, const RenderParams& params, const Colormap* custom) {
  if (auto err = validate(params)) throw std::invalid_argument(err->field + ": " + err->message);
  if (!(SceneKey::from(params) == scene.key)) throw std::invalid_argument("scene was built for different kernel/bandwidth");
  Frame f;
  const Colormap cmap = colormap_for(scene, params, custom);
  f.base = map_density(scene.density, cmap, &scene.clusters);
  f.normals = compute_normals(scene, params);
  f.lighting = compute_lighting(scene, params, f.normals.structure);
  f.image = recompose(f, params, &f.clamp_mask);
  f.scaled_intensity = scale_intensity(f.lighting.intensity, params.phi);
  return f;
}

ColorImage recompose(const Frame& frame, const RenderParams& params, Grid<std::uint8_t>* clamp_mask) {
  if (params.shading == ShadingSpace::direct_rgb_baseline) {
    if (clamp_mask) *clamp_mask = Grid<std::uint8_t>(frame.base.width(), frame.base.height(), 0);
    return baseline_rgb_lambert(frame.base, frame.lighting.intensity, params.baseline);
  }
  const auto space = params.colormap == ColormapKind::single_hue_per_cluster ? CompositionSpace::hcl_single_hue
                                                                               : CompositionSpace::lab_multi_hue;
  return compose_luminance(frame.base, scale_intensity(frame.lighting.intensity, params.phi), space, clamp_mask);
}

}  // namespace lineglow
