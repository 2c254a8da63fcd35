#pragma once

#include <cstdint>
#include <vector>

#include "lineglow/data_model.hpp"
#include "lineglow/grid.hpp"

namespace lineglow::synthetic {

/// Reference corridor dataset: 3000 lines on 512x512, a typical sample size for vessel traffic.
/// Fidelity results depend on density relief, so the size is pinned here.
inline constexpr int kCorridorLines = 3000;
inline constexpr int kCorridorSize = 512;
inline constexpr std::uint64_t kCorridorSeed = 11;

/// Noisy bundles following three smooth corridors plus a few random crossers.
/// Clusters are the corridor index (crossers get cluster 3). Grid coordinates.
std::vector<Polyline> corridor_lines(int count, int width, int height, std::uint64_t seed);

/// Random wandering polylines of 3-4 segments, 60-200 pixels long, inside the grid.
std::vector<Polyline> random_lines(int count, int width, int height, std::uint64_t seed);

/// `copies` identical horizontal lines and one vertical crosser (id = copies) through their middle.
std::vector<Polyline> parallel_with_crosser(int copies, int width, int height);

/// Random polylines with integer vertices whose segments all have an odd major-axis length,
/// so rasterization never hits a rounding tie and commutes with quarter turns.
std::vector<Polyline> tie_free_lines(int count, int size, std::uint64_t seed);

/// Quarter turn of grid-space lines on a size×size grid: (x, y) -> (size - 1 - y, x).
std::vector<Polyline> rotate_quarter(const std::vector<Polyline>& lines, int size);

/// The same quarter turn applied to a square field.
template <typename T>
Grid<T> rotate_quarter(const Grid<T>& g) {
  const int n = g.width();
  Grid<T> out(n, g.height());
  for (int r = 0; r < g.height(); ++r) {
    for (int c = 0; c < n; ++c) out(n - 1 - r, c) = g(c, r);
  }
  return out;
}

/// CSV text `line_id,x,y[,cluster]` of grid-space lines (y written as -row so the file is upright).
std::string to_csv(const std::vector<Polyline>& grid_lines);

}  // namespace lineglow::synthetic
