#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lineglow/data_model.hpp"
#include "lineglow/density.hpp"

namespace lineglow {

/// Narrow-band influence of one line: at each band pixel the Gaussian of the distance to
/// the nearest line pixel, together with that pixel's tangent.
class InfluenceField {
 public:
  InfluenceField() = default;
  InfluenceField(const RasterizedLine& line, double bandwidth_h, int radius);

  int line_id() const { return line_id_; }
  int radius() const { return radius_; }
  double bandwidth() const { return h_; }
  int width() const { return width_; }
  int height() const { return height_; }
  const std::vector<BandCell>& cells() const { return cells_; }

  /// N_h(d) for the cell's distance d.
  double value(const BandCell& cell) const { return (*table_)[cell.d2]; }
  /// exp(-d^2 / 2h^2), i.e. value / N_h(0).
  double relative(const BandCell& cell) const { return (*table_)[cell.d2] * inv_peak_; }
  Vec2 tangent(const BandCell& cell) const { return tangents_[cell.nearest]; }

  const BandCell* find(std::uint32_t pixel) const;
  const BandCell* find(int col, int row) const;
  /// Influence value at a pixel, 0 outside the stored band.
  double value_at(int col, int row) const;

 private:
  int line_id_ = 0;
  int radius_ = 0;
  double h_ = 1.0;
  double inv_peak_ = 1.0;
  int width_ = 0;
  int height_ = 0;
  std::vector<BandCell> cells_;
  std::vector<Vec2> tangents_;
  std::shared_ptr<const std::vector<double>> table_;
};

std::vector<InfluenceField> build_influence_fields(const std::vector<RasterizedLine>& lines, double bandwidth_h,
                                                   int radius);

/// Direction-modulated similarity of l_prime to l, in [0, N_h(0)]:
///   (1/|P_l'|) * sum_{p in P_l'} |t_l(p) . t_l'(p)| * L_h(p)
/// Only cells of `field_l` within band_radius count (defaults to the field's radius).
double similarity(const InfluenceField& field_l, const RasterizedLine& l_prime,
                  std::optional<int> band_radius = std::nullopt);

struct OutlierIndex {
  std::vector<int> line_ids;          // parallel to the input lines
  std::vector<double> scores;         // outlierness in [0,1]
  std::vector<std::size_t> ranks;     // 0 = strongest inlier
  std::vector<double> normalized;     // rank / (n-1)
  std::vector<std::size_t> neighbor_counts;
  std::optional<std::vector<std::vector<int>>> neighbors;  // line ids, sorted; only when requested

  std::size_t size() const { return line_ids.size(); }
  /// Line indices ordered by rank.
  std::vector<std::size_t> order() const;
};

class OutlierError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct OutliernessOptions {
  bool collect_neighbors = false;
};

/// outlierness(l) = 1 - mean_{l' in N(l)} sim(l, l') / N_h(0), with N(l) the lines having a
/// pixel inside l's band. Isolated lines score 1. Runs one pass per line over its band using a
/// per-pixel index of line pixels, so no pair of lines is ever compared directly.
OutlierIndex outlierness_all(const std::vector<RasterizedLine>& lines, const std::vector<InfluenceField>& fields,
                             int band_radius, const OutliernessOptions& options = {});

/// Convenience overload that builds the influence fields.
OutlierIndex outlierness_all(const std::vector<RasterizedLine>& lines, double bandwidth_h, int band_radius,
                             const OutliernessOptions& options = {});

/// Ascending by score, ties by line id; fills ranks and normalized.
void assign_ranks(OutlierIndex& index);

/// 20-bin histogram of scores over [0,1].
std::vector<std::size_t> score_histogram(const OutlierIndex& index, int bins = 20);

}  // namespace lineglow
