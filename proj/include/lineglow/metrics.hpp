#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lineglow/composition.hpp"
#include "lineglow/pipeline.hpp"

namespace lineglow {

/// Mean CIEDE2000 between two images over pixels that are non-empty in `reference`.
/// Returns 0 when the reference has no non-empty pixel.
double mean_delta_e(const ColorImage& reference, const ColorImage& other);

inline constexpr double kDeltaEThreshold = 3.0;

struct FidelityReport {
  std::vector<double> phis;
  std::vector<double> ours;      // mean delta E per phi
  std::vector<double> baseline;  // RGB Lambertian with the same intensity map
  double threshold = kDeltaEThreshold;
  std::optional<double> crossing_phi;  // first phi at which ours reaches the threshold

  std::string to_csv() const;
};

/// Renders once, then recomposes at each phi. The baseline uses the same intensity map.
FidelityReport fidelity_sweep(const Scene& scene, const RenderParams& params, const std::vector<double>& phis,
                              BaselineVariant variant = BaselineVariant::full, double threshold = kDeltaEThreshold);

/// Linear interpolation of the first threshold crossing along the sweep.
std::optional<double> threshold_crossing(const std::vector<double>& phis, const std::vector<double>& values,
                                         double threshold);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares y = slope * x + intercept with coefficient of determination.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

struct StageTimes {
  double outlierness = 0.0;
  double normal_map = 0.0;
  double lighting = 0.0;
};

struct ScalingReport {
  std::vector<int> counts;
  std::vector<StageTimes> seconds;  // median of repeats
  LinearFit outlierness_fit, normal_map_fit, lighting_fit;

  /// time(count_b) / time(count_a) for the outlierness stage.
  std::optional<double> outlierness_ratio(int count_a, int count_b) const;
  std::string to_csv() const;
};

struct BenchOptions {
  int width = 512;
  int height = 512;
  int repeats = 3;
  std::uint64_t seed = 7;
  RenderParams params;
  /// Dataset generator; defaults to synthetic::random_lines.
  std::function<std::vector<Polyline>(int count, int width, int height, std::uint64_t seed)> generator;
  /// Called after each measured count, for progress output.
  std::function<void(int count, const StageTimes&)> progress;
};

/// Times the outlierness, normal map and lighting stages on synthetic data for each count.
ScalingReport bench_scaling(const std::vector<int>& counts, const BenchOptions& options = {});

double median(std::vector<double> values);

/// Seconds elapsed while running fn, on a monotonic clock.
template <typename Fn>
double time_seconds(Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace lineglow
