#pragma once

#include <cstdint>
#include <vector>

#include "lineglow/data_model.hpp"
#include "lineglow/grid.hpp"

namespace lineglow {

/// Isotropic 2D Gaussian with standard deviation h evaluated at distance d.
double gaussian(double d, double h);

/// max(5, ceil(3h)).
int default_band_radius(double h);

/// One pixel of the narrow band around a rasterized line.
struct BandCell {
  std::uint32_t pixel = 0;    // row-major grid index
  std::uint32_t d2 = 0;       // squared distance to the nearest line pixel
  std::uint32_t nearest = 0;  // index into RasterizedLine::pixels
};

/// All grid pixels within Euclidean distance `radius` of the line's pixel chain, sorted by
/// pixel index. On equal distance the earliest line pixel wins.
std::vector<BandCell> nearest_band(const RasterizedLine& line, int radius);

/// Sparse per-line field: (row-major pixel index, value), sorted by index.
struct SparseField {
  int width = 0;
  int height = 0;
  std::vector<std::pair<std::uint32_t, double>> cells;

  double at(std::uint32_t pixel) const;
  double max_value() const;
};

/// Discretized curve density of one line, summed over its segments:
///   v(p) = sum_s 1/|P_s| * sum_{q in P_s} N_h(|p - q|)
/// evaluated only on pixels within band_radius of the line. The kernel sum itself is
/// truncated at kernel_cutoff(h) pixels, far enough that the tail is below 1e-4 of the peak.
SparseField line_density(const RasterizedLine& line, double bandwidth_h, int band_radius);

/// Distance beyond which individual kernels are dropped from the sum.
int kernel_cutoff(double h);

struct DensityField {
  ScalarGrid grid;
  double bandwidth_h = 1.0;
  int band_radius = 5;
  std::vector<double> per_line_max;  // parallel to the input lines

  double max_value() const;
};

/// F(p) = sum over lines of line_density(line)(p), reduced in input order.
DensityField aggregate(const std::vector<RasterizedLine>& lines, double bandwidth_h, int band_radius);

/// Adds one sparse field into a dense grid.
void accumulate(ScalarGrid& grid, const SparseField& field);

}  // namespace lineglow
