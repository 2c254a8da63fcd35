#include "lineglow/chart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lineglow {

namespace {

struct Canvas {
  ColorImage img;

  void put(Pixel p, Rgb8 c) {
    if (!img.pixels.contains(p)) return;
    img.pixels(p.col, p.row) = c;
    img.empty(p.col, p.row) = 0;
  }
  void line(Vec2 a, Vec2 b, Rgb8 c, bool dashed = false, int thickness = 1) {
    const auto px = walk_segment(a, b);
    for (std::size_t i = 0; i < px.size(); ++i) {
      if (dashed && (i / 6) % 2 == 1) continue;
      for (int dy = 0; dy < thickness; ++dy) {
        for (int dx = 0; dx < thickness; ++dx) put({px[i].col + dx, px[i].row + dy}, c);
      }
    }
  }
  void box(Pixel center, int half, Rgb8 c) {
    for (int dy = -half; dy <= half; ++dy) {
      for (int dx = -half; dx <= half; ++dx) put({center.col + dx, center.row + dy}, c);
    }
  }
};

}  // namespace

ColorImage line_chart(const std::vector<ChartSeries>& series, const ChartOptions& opt) {
  if (opt.width < 64 || opt.height < 64) throw std::invalid_argument("chart too small");
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("series x/y length mismatch");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (opt.reference_y) y0 = std::min(y0, *opt.reference_y), y1 = std::max(y1, *opt.reference_y);
  y0 = std::min(y0, 0.0);
  if (opt.y_min) y0 = *opt.y_min;
  if (opt.y_max) y1 = *opt.y_max;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  y1 += 0.05 * (y1 - y0);

  Canvas cv{ColorImage(opt.width, opt.height)};
  const double left = 40, right = opt.width - 16.0, top = 16, bottom = opt.height - 32.0;
  auto map = [&](double x, double y) -> Vec2 {
    return {left + (x - x0) / (x1 - x0) * (right - left), bottom - (y - y0) / (y1 - y0) * (bottom - top)};
  };
  const Rgb8 axis{40, 40, 40}, grid{225, 225, 225};
  for (int k = 0; k <= 4; ++k) {
    const double gy = bottom - k * (bottom - top) / 4, gx = left + k * (right - left) / 4;
    cv.line({left, gy}, {right, gy}, grid);
    cv.line({left - 5, gy}, {left, gy}, axis);
    cv.line({gx, bottom}, {gx, bottom + 5}, axis);
  }
  cv.line({left, top}, {left, bottom}, axis);
  cv.line({left, bottom}, {right, bottom}, axis);
  if (opt.reference_y) cv.line(map(x0, *opt.reference_y), map(x1, *opt.reference_y), {150, 150, 150}, true);

  for (const auto& s : series) {
    for (std::size_t i = 0; i + 1 < s.x.size(); ++i) cv.line(map(s.x[i], s.y[i]), map(s.x[i + 1], s.y[i + 1]), s.color, s.dashed, 2);
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const Vec2 p = map(s.x[i], s.y[i]);
      cv.box({static_cast<int>(std::lround(p.x)), static_cast<int>(std::lround(p.y))}, 2, s.color);
    }
  }
  return cv.img;
}

}  // namespace lineglow
