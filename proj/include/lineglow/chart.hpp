#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lineglow/composition.hpp"

namespace lineglow {

struct ChartSeries {
  std::vector<double> x;
  std::vector<double> y;
  Rgb8 color;
  bool dashed = false;
};

struct ChartOptions {
  int width = 640;
  int height = 400;
  std::optional<double> reference_y;  // drawn as a gray horizontal rule
  std::optional<double> y_min;        // axis range overrides
  std::optional<double> y_max;
};

/// Minimal line chart: axes with five ticks each, one polyline per series, markers at samples.
/// Drawn with the same integer line walk as the density rasterizer; carries no text.
ColorImage line_chart(const std::vector<ChartSeries>& series, const ChartOptions& options = {});

}  // namespace lineglow
