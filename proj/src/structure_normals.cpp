#include "lineglow/structure_normals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lineglow/parallel.hpp"

namespace lineglow {

Selection select_lines(const OutlierIndex& index, double mu, double sigma) {
  Selection sel;
  sel.mu = mu;
  sel.sigma = sigma;
  const std::size_t n = index.size();
  sel.delta.resize(n);
  for (std::size_t i = 0; i < n; ++i) sel.delta[i] = std::abs(index.normalized[i] - mu);
  const auto count =
      static_cast<std::size_t>(std::clamp(std::floor(sigma * static_cast<double>(n) + 0.5), 0.0, double(n)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (sel.delta[a] != sel.delta[b]) return sel.delta[a] < sel.delta[b];
    return index.line_ids[a] < index.line_ids[b];
  });
  order.resize(count);
  sel.selected = std::move(order);
  return sel;
}

Vec3 gradient_normal(double dx, double dy, double eta) { return normalized(Vec3{-dx, -dy, 1.0 / eta}); }

namespace {

template <typename Sample>
void central_difference(int col, int row, int width, int height, const Sample& f, double& gx, double& gy) {
  if (width == 1) {
    gx = 0.0;
  } else if (col == 0) {
    gx = f(1, row) - f(0, row);
  } else if (col == width - 1) {
    gx = f(col, row) - f(col - 1, row);
  } else {
    gx = 0.5 * (f(col + 1, row) - f(col - 1, row));
  }
  if (height == 1) {
    gy = 0.0;
  } else if (row == 0) {
    gy = f(col, 1) - f(col, 0);
  } else if (row == height - 1) {
    gy = f(col, row) - f(col, row - 1);
  } else {
    gy = 0.5 * (f(col, row + 1) - f(col, row - 1));
  }
}

}  // namespace

NormalGrid low_freq_normals(const ScalarGrid& density, double eta) {
  const int w = density.width();
  const int h = density.height();
  NormalGrid out(w, h, kProvenanceLow);
  auto sample = [&](int c, int r) { return density(c, r); };
  parallel_for(0, static_cast<std::size_t>(h), [&](std::size_t row) {
    for (int col = 0; col < w; ++col) {
      double gx = 0.0, gy = 0.0;
      central_difference(col, static_cast<int>(row), w, h, sample, gx, gy);
      out.normals(col, static_cast<int>(row)) = gradient_normal(gx, gy, eta);
      if (density(col, static_cast<int>(row)) == 0.0) out.provenance(col, static_cast<int>(row)) = kProvenanceEmpty;
    }
  });
  return out;
}

int footprint_field_radius(int kernel_n, int band_radius) {
  const int half = kernel_n / 2;
  // Farthest footprint pixel is the window corner; one more pixel for the gradient stencil.
  const int reach = static_cast<int>(std::ceil(std::sqrt(2.0) * half)) + 1;
  return std::max(band_radius, reach);
}

NormalGrid high_freq_normals(const Selection& selection, const std::vector<RasterizedLine>& lines,
                             const std::vector<InfluenceField>& fields, double eta_high) {
  if (lines.empty()) throw std::invalid_argument("high_freq_normals: no lines");
  const int w = lines.front().width;
  const int h = lines.front().height;
  NormalGrid out(w, h, kProvenanceEmpty);
  if (selection.empty()) return out;

  constexpr auto kNone = std::numeric_limits<std::uint32_t>::max();
  Grid<std::uint32_t> best_d2(w, h, kNone);
  Grid<std::int32_t>& owner = out.provenance;

  // Candidates arrive in ascending (delta, id) order, so a later line only wins on equal
  // delta with a strictly smaller distance.
  for (const std::size_t li : selection.selected) {
    const auto& field = fields[li];
    const double delta = selection.delta[li];
    for (const Pixel p : lines[li].footprint) {
      const BandCell* cell = field.find(p.col, p.row);
      const std::uint32_t d2 = cell ? cell->d2 : kNone - 1;
      const std::size_t idx = owner.index(p.col, p.row);
      const std::int32_t cur = owner[idx];
      if (cur < 0) {
        owner[idx] = static_cast<std::int32_t>(li);
        best_d2[idx] = d2;
        continue;
      }
      const double cur_delta = selection.delta[static_cast<std::size_t>(cur)];
      if (delta == cur_delta &&
          (d2 < best_d2[idx] || (d2 == best_d2[idx] && lines[li].line_id < lines[cur].line_id))) {
        owner[idx] = static_cast<std::int32_t>(li);
        best_d2[idx] = d2;
      }
    }
  }

  parallel_for(0, static_cast<std::size_t>(h), [&](std::size_t row_u) {
    const int row = static_cast<int>(row_u);
    for (int col = 0; col < w; ++col) {
      const std::int32_t c = owner(col, row);
      if (c < 0) continue;
      const auto& field = fields[static_cast<std::size_t>(c)];
      auto sample = [&](int cc, int rr) { return field.value_at(cc, rr); };
      double gx = 0.0, gy = 0.0;
      central_difference(col, row, w, h, sample, gx, gy);
      out.normals(col, row) = gradient_normal(gx, gy, eta_high);
    }
  });
  return out;
}

NormalGrid compose(const NormalGrid& low, const NormalGrid& high) {
  require_same_shape(low.normals, high.normals, "compose");
  NormalGrid out = low;
  for (std::size_t i = 0; i < out.normals.size(); ++i) {
    if (high.is_high(i)) {
      out.normals[i] = high.normals[i];
      out.provenance[i] = high.provenance[i];
    }
  }
  return out;
}

}  // namespace lineglow
