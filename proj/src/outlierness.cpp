#include "lineglow/outlierness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lineglow/parallel.hpp"

namespace lineglow {

InfluenceField::InfluenceField(const RasterizedLine& line, double bandwidth_h, int radius)
    : line_id_(line.line_id),
      radius_(radius),
      h_(bandwidth_h),
      inv_peak_(1.0 / gaussian(0.0, bandwidth_h)),
      width_(line.width),
      height_(line.height),
      cells_(nearest_band(line, radius)),
      tangents_(line.tangents) {
  auto table = std::make_shared<std::vector<double>>(static_cast<std::size_t>(radius) * radius + 1);
  for (std::size_t d2 = 0; d2 < table->size(); ++d2) (*table)[d2] = gaussian(std::sqrt(double(d2)), bandwidth_h);
  table_ = std::move(table);
}

const BandCell* InfluenceField::find(std::uint32_t pixel) const {
  auto it = std::lower_bound(cells_.begin(), cells_.end(), pixel,
                             [](const BandCell& c, std::uint32_t p) { return c.pixel < p; });
  return (it != cells_.end() && it->pixel == pixel) ? &*it : nullptr;
}

const BandCell* InfluenceField::find(int col, int row) const {
  if (col < 0 || row < 0 || col >= width_ || row >= height_) return nullptr;
  return find(static_cast<std::uint32_t>(row) * width_ + col);
}

double InfluenceField::value_at(int col, int row) const {
  const BandCell* c = find(col, row);
  return c ? value(*c) : 0.0;
}

std::vector<InfluenceField> build_influence_fields(const std::vector<RasterizedLine>& lines, double bandwidth_h,
                                                   int radius) {
  std::vector<InfluenceField> out(lines.size());
  parallel_for(0, lines.size(), [&](std::size_t i) { out[i] = InfluenceField(lines[i], bandwidth_h, radius); });
  return out;
}

double similarity(const InfluenceField& field_l, const RasterizedLine& l_prime, std::optional<int> band_radius) {
  if (l_prime.empty()) return 0.0;
  const std::uint32_t r = static_cast<std::uint32_t>(band_radius.value_or(field_l.radius()));
  const std::uint32_t r2 = r * r;
  double sum = 0.0;
  for (std::size_t i = 0; i < l_prime.pixels.size(); ++i) {
    const BandCell* cell = field_l.find(l_prime.pixels[i].col, l_prime.pixels[i].row);
    if (!cell || cell->d2 > r2) continue;
    sum += std::abs(dot(field_l.tangent(*cell), l_prime.tangents[i])) * field_l.value(*cell);
  }
  return sum / static_cast<double>(l_prime.pixels.size());
}

namespace {

// Compressed per-pixel list of the line pixels that land on each grid cell.
struct PixelLineIndex {
  std::vector<std::uint32_t> offsets;  // size cells + 1
  struct Entry {
    std::uint32_t line;
    Vec2 tangent;
  };
  std::vector<Entry> entries;

  PixelLineIndex(const std::vector<RasterizedLine>& lines, int width, int height) {
    const std::size_t cells = static_cast<std::size_t>(width) * height;
    offsets.assign(cells + 1, 0);
    for (const auto& line : lines) {
      for (const Pixel p : line.pixels) ++offsets[static_cast<std::size_t>(p.row) * width + p.col + 1];
    }
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    entries.resize(offsets.back());
    std::vector<std::uint32_t> cursor(offsets.begin(), offsets.end() - 1);
    for (std::uint32_t l = 0; l < lines.size(); ++l) {
      const auto& line = lines[l];
      for (std::size_t i = 0; i < line.pixels.size(); ++i) {
        const std::size_t idx = static_cast<std::size_t>(line.pixels[i].row) * width + line.pixels[i].col;
        entries[cursor[idx]++] = {l, line.tangents[i]};
      }
    }
  }
};

}  // namespace

OutlierIndex outlierness_all(const std::vector<RasterizedLine>& lines, const std::vector<InfluenceField>& fields,
                             int band_radius, const OutliernessOptions& options) {
  const std::size_t n = lines.size();
  if (n < 2) throw OutlierError("outlierness needs at least 2 lines");
  if (fields.size() != n) throw OutlierError("one influence field per line required");
  const int width = lines.front().width;
  const int height = lines.front().height;
  for (std::size_t i = 0; i < n; ++i) {
    if (fields[i].radius() < band_radius) throw OutlierError("influence field narrower than the band");
    if (lines[i].width != width || lines[i].height != height) throw DimensionMismatch("lines on different grids");
  }

  const PixelLineIndex index(lines, width, height);
  std::vector<double> inv_len(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!lines[i].empty()) inv_len[i] = 1.0 / static_cast<double>(lines[i].pixels.size());
  }

  OutlierIndex out;
  out.line_ids.resize(n);
  out.scores.assign(n, 1.0);
  out.neighbor_counts.assign(n, 0);
  if (options.collect_neighbors) out.neighbors.emplace(n);
  for (std::size_t i = 0; i < n; ++i) out.line_ids[i] = lines[i].line_id;

  const std::uint32_t r2 = static_cast<std::uint32_t>(band_radius) * band_radius;
  parallel_for(0, n, [&](std::size_t l) {
    thread_local std::vector<std::uint32_t> seen;
    thread_local std::uint32_t generation = 0;
    if (seen.size() != n) {
      seen.assign(n, 0);
      generation = 0;
    }
    if (++generation == 0) {
      std::fill(seen.begin(), seen.end(), 0);
      generation = 1;
    }
    const auto& field = fields[l];
    double sum = 0.0;
    std::size_t count = 0;
    std::vector<int>* nbrs = options.collect_neighbors ? &(*out.neighbors)[l] : nullptr;
    for (const BandCell& cell : field.cells()) {
      if (cell.d2 > r2) continue;
      const std::uint32_t begin = index.offsets[cell.pixel];
      const std::uint32_t end = index.offsets[cell.pixel + 1];
      if (begin == end) continue;
      const Vec2 t = field.tangent(cell);
      const double w = field.relative(cell);
      for (std::uint32_t e = begin; e < end; ++e) {
        const auto& entry = index.entries[e];
        if (entry.line == l) continue;
        sum += std::abs(dot(t, entry.tangent)) * w * inv_len[entry.line];
        if (seen[entry.line] != generation) {
          seen[entry.line] = generation;
          ++count;
          if (nbrs) nbrs->push_back(lines[entry.line].line_id);
        }
      }
    }
    out.neighbor_counts[l] = count;
    if (count > 0) out.scores[l] = std::clamp(1.0 - sum / static_cast<double>(count), 0.0, 1.0);
    if (nbrs) std::sort(nbrs->begin(), nbrs->end());
  });

  assign_ranks(out);
  return out;
}

OutlierIndex outlierness_all(const std::vector<RasterizedLine>& lines, double bandwidth_h, int band_radius,
                             const OutliernessOptions& options) {
  return outlierness_all(lines, build_influence_fields(lines, bandwidth_h, band_radius), band_radius, options);
}

void assign_ranks(OutlierIndex& index) {
  const std::size_t n = index.scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (index.scores[a] != index.scores[b]) return index.scores[a] < index.scores[b];
    return index.line_ids[a] < index.line_ids[b];
  });
  index.ranks.assign(n, 0);
  index.normalized.assign(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    index.ranks[order[r]] = r;
    index.normalized[order[r]] = n > 1 ? static_cast<double>(r) / static_cast<double>(n - 1) : 0.0;
  }
}

std::vector<std::size_t> OutlierIndex::order() const {
  std::vector<std::size_t> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[ranks[i]] = i;
  return out;
}

std::vector<std::size_t> score_histogram(const OutlierIndex& index, int bins) {
  std::vector<std::size_t> hist(static_cast<std::size_t>(bins), 0);
  for (double s : index.scores) {
    auto b = static_cast<int>(std::floor(s * bins));
    hist[static_cast<std::size_t>(std::clamp(b, 0, bins - 1))]++;
  }
  return hist;
}

}  // namespace lineglow
