#include "lineglow/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lineglow/parallel.hpp"

namespace lineglow {

namespace {

struct Offset {
  int dx;
  int dy;
  std::uint32_t d2;
};

std::vector<Offset> disc_offsets(int radius) {
  std::vector<Offset> out;
  const int r2 = radius * radius;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      const int d2 = dx * dx + dy * dy;
      if (d2 <= r2) out.push_back({dx, dy, static_cast<std::uint32_t>(d2)});
    }
  }
  return out;
}

// Per-thread scratch grid with generation stamps so it never needs clearing.
struct Scratch {
  std::vector<std::uint32_t> stamp;
  std::vector<std::uint32_t> d2;
  std::vector<std::uint32_t> nearest;
  std::vector<double> acc;
  std::uint32_t generation = 0;

  void prepare(std::size_t cells) {
    if (stamp.size() != cells) {
      stamp.assign(cells, 0);
      d2.assign(cells, 0);
      nearest.assign(cells, 0);
      acc.assign(cells, 0.0);
      generation = 0;
    }
    if (++generation == 0) {
      std::fill(stamp.begin(), stamp.end(), 0);
      generation = 1;
    }
  }
};

Scratch& scratch() {
  thread_local Scratch s;
  return s;
}

// Fills the scratch with the band and returns the touched pixel indices, sorted.
std::vector<std::uint32_t> build_band(const RasterizedLine& line, int radius, Scratch& s) {
  s.prepare(static_cast<std::size_t>(line.width) * line.height);
  const auto offsets = disc_offsets(radius);
  std::vector<std::uint32_t> touched;
  touched.reserve(line.pixels.size() * (2 * radius + 1) + offsets.size());
  for (std::uint32_t i = 0; i < line.pixels.size(); ++i) {
    const Pixel q = line.pixels[i];
    for (const auto& o : offsets) {
      const int c = q.col + o.dx;
      const int r = q.row + o.dy;
      if (c < 0 || r < 0 || c >= line.width || r >= line.height) continue;
      const std::uint32_t idx = static_cast<std::uint32_t>(r) * line.width + c;
      if (s.stamp[idx] != s.generation) {
        s.stamp[idx] = s.generation;
        s.d2[idx] = o.d2;
        s.nearest[idx] = i;
        touched.push_back(idx);
      } else if (o.d2 < s.d2[idx]) {
        s.d2[idx] = o.d2;
        s.nearest[idx] = i;
      }
    }
  }
  std::sort(touched.begin(), touched.end());
  return touched;
}

}  // namespace

double gaussian(double d, double h) {
  return std::exp(-(d * d) / (2.0 * h * h)) / (2.0 * std::numbers::pi * h * h);
}

int default_band_radius(double h) { return std::max(5, static_cast<int>(std::ceil(3.0 * h))); }

int kernel_cutoff(double h) { return std::max(1, static_cast<int>(std::ceil(4.5 * h))); }

std::vector<BandCell> nearest_band(const RasterizedLine& line, int radius) {
  if (line.empty()) return {};
  auto& s = scratch();
  const auto touched = build_band(line, radius, s);
  std::vector<BandCell> out;
  out.reserve(touched.size());
  for (auto idx : touched) out.push_back({idx, s.d2[idx], s.nearest[idx]});
  return out;
}

double SparseField::at(std::uint32_t pixel) const {
  auto it = std::lower_bound(cells.begin(), cells.end(), pixel,
                             [](const auto& cell, std::uint32_t p) { return cell.first < p; });
  return (it != cells.end() && it->first == pixel) ? it->second : 0.0;
}

double SparseField::max_value() const {
  double m = 0.0;
  for (const auto& c : cells) m = std::max(m, c.second);
  return m;
}

SparseField line_density(const RasterizedLine& line, double bandwidth_h, int band_radius) {
  SparseField out{line.width, line.height, {}};
  if (line.empty()) return out;
  auto& s = scratch();
  const auto band = build_band(line, band_radius, s);
  for (auto idx : band) s.acc[idx] = 0.0;

  const int cutoff = kernel_cutoff(bandwidth_h);
  const auto offsets = disc_offsets(cutoff);
  std::vector<double> kernel(static_cast<std::size_t>(cutoff) * cutoff + 1);
  for (std::size_t d2 = 0; d2 < kernel.size(); ++d2) kernel[d2] = gaussian(std::sqrt(double(d2)), bandwidth_h);

  for (std::size_t k = 0; k < line.pixels.size(); ++k) {
    const Pixel q = line.pixels[k];
    const double w = line.weights[k];
    for (const auto& o : offsets) {
      const int c = q.col + o.dx;
      const int r = q.row + o.dy;
      if (c < 0 || r < 0 || c >= line.width || r >= line.height) continue;
      const std::uint32_t idx = static_cast<std::uint32_t>(r) * line.width + c;
      if (s.stamp[idx] != s.generation) continue;  // outside the band
      s.acc[idx] += w * kernel[o.d2];
    }
  }
  out.cells.reserve(band.size());
  for (auto idx : band) out.cells.emplace_back(idx, s.acc[idx]);
  return out;
}

void accumulate(ScalarGrid& grid, const SparseField& field) {
  if (!grid.same_shape(field.width, field.height)) throw DimensionMismatch("accumulate: field shape differs");
  for (const auto& [idx, v] : field.cells) grid[idx] += v;
}

double DensityField::max_value() const {
  double m = 0.0;
  for (double v : grid.values()) m = std::max(m, v);
  return m;
}

DensityField aggregate(const std::vector<RasterizedLine>& lines, double bandwidth_h, int band_radius) {
  if (std::none_of(lines.begin(), lines.end(), [](const auto& l) { return !l.empty(); })) {
    throw std::invalid_argument("aggregate: no nonempty lines");
  }
  const int w = lines.front().width;
  const int h = lines.front().height;
  DensityField out;
  out.grid = ScalarGrid(w, h, 0.0);
  out.bandwidth_h = bandwidth_h;
  out.band_radius = band_radius;
  out.per_line_max.assign(lines.size(), 0.0);

  // Lines are processed in blocks so per-line fields need not all be alive at once.
  const std::size_t block = 256;
  std::vector<SparseField> fields;
  for (std::size_t start = 0; start < lines.size(); start += block) {
    const std::size_t stop = std::min(lines.size(), start + block);
    fields.assign(stop - start, SparseField{});
    parallel_for(start, stop, [&](std::size_t i) {
      fields[i - start] = line_density(lines[i], bandwidth_h, band_radius);
    });
    for (std::size_t i = start; i < stop; ++i) {
      const auto& f = fields[i - start];
      if (f.width != w || f.height != h) throw DimensionMismatch("aggregate: line grids differ");
      accumulate(out.grid, f);
      out.per_line_max[i] = f.max_value();
    }
  }
  return out;
}

}  // namespace lineglow
