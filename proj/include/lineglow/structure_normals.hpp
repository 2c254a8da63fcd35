#pragma once

#include <cstdint>
#include <vector>

#include "lineglow/data_model.hpp"
#include "lineglow/density.hpp"
#include "lineglow/grid.hpp"
#include "lineglow/outlierness.hpp"

namespace lineglow {

/// Where a composed normal came from. Non-negative values are line indices (high frequency).
enum Provenance : std::int32_t { kProvenanceEmpty = -2, kProvenanceLow = -1 };

struct NormalGrid {
  Grid<Vec3> normals;
  Grid<std::int32_t> provenance;

  NormalGrid() = default;
  NormalGrid(int width, int height, std::int32_t fill = kProvenanceEmpty)
      : normals(width, height, Vec3{0.0, 0.0, 1.0}), provenance(width, height, fill) {}

  int width() const { return normals.width(); }
  int height() const { return normals.height(); }
  bool is_high(std::size_t i) const { return provenance[i] >= 0; }
};

struct Selection {
  double mu = 0.0;
  double sigma = 0.0;
  std::vector<std::size_t> selected;  // line indices, ascending (delta, line id)
  std::vector<double> delta;          // |l'_i - mu| per line index

  bool empty() const { return selected.empty(); }
};

/// The round(sigma * n) lines whose normalized rank is closest to mu.
Selection select_lines(const OutlierIndex& index, double mu, double sigma);

/// n_low = normalize(-dF/dx, -dF/dy, 1/eta) with central differences, one-sided at borders.
NormalGrid low_freq_normals(const ScalarGrid& density, double eta);

/// Gradient normal of a scalar field at one pixel, same stencil as low_freq_normals.
Vec3 gradient_normal(double dx, double dy, double eta);

/// Per-pixel normals of the selected lines' influence fields over the union of their
/// footprints. Each covered pixel takes its normal from a single contributor, the covering line
/// with the smallest (delta, distance, line id).
NormalGrid high_freq_normals(const Selection& selection, const std::vector<RasterizedLine>& lines,
                             const std::vector<InfluenceField>& fields, double eta_high);

/// Prioritized replacement: high-frequency normal wherever one exists, low-frequency elsewhere.
NormalGrid compose(const NormalGrid& low, const NormalGrid& high);

/// Radius an influence field must reach so footprints and their gradient stencil are covered.
int footprint_field_radius(int kernel_n, int band_radius);

}  // namespace lineglow
