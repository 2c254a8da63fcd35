#include <doctest.h>

#include "lineglow/metrics.hpp"
#include "lineglow/synthetic.hpp"

using namespace lineglow;

TEST_CASE("linear fit") {
  const LinearFit exact = linear_fit({1, 2, 3, 4}, {3, 5, 7, 9});
  CHECK(exact.slope == doctest::Approx(2.0));
  CHECK(exact.intercept == doctest::Approx(1.0));
  CHECK(exact.r2 == doctest::Approx(1.0));
  const LinearFit noisy = linear_fit({0, 1, 2, 3}, {0, 1, 0, 1});
  CHECK(noisy.slope == doctest::Approx(0.2));
  CHECK(noisy.r2 == doctest::Approx(0.2));
  CHECK_THROWS(linear_fit({1}, {1}));
}

TEST_CASE("median and threshold crossing") {
  CHECK(median({3, 1, 2}) == 2.0);
  CHECK(median({4, 1, 3, 2}) == 2.5);
  CHECK(*threshold_crossing({0, -10, -20}, {0, 2, 4}, 3.0) == doctest::Approx(-15.0));
  CHECK(*threshold_crossing({0, -10}, {0, 3}, 3.0) == doctest::Approx(-10.0));
  CHECK_FALSE(threshold_crossing({0, -10}, {0, 2}, 3.0));
}

TEST_CASE("mean delta E counts only non-empty reference pixels") {
  ColorImage a(2, 1), b(2, 1);
  a.empty[0] = 0;
  a.pixels[0] = {0, 0, 0};
  b.pixels[0] = {255, 255, 255};
  b.pixels[1] = {0, 0, 0};  // differs, but empty in the reference
  CHECK(mean_delta_e(a, b) == doctest::Approx(100.0).epsilon(1e-5));
  CHECK(mean_delta_e(ColorImage(3, 3), ColorImage(3, 3, {1, 2, 3})) == 0.0);
}

TEST_CASE("fidelity sweep shape") {
  const Scene scene = build_scene(dataset_in_grid_space(synthetic::corridor_lines(400, 192, 192, 2), 192, 192), SceneKey{});
  RenderParams p;
  std::vector<double> phis;
  for (double phi = 0; phi >= -40; phi -= 10) phis.push_back(phi);
  const FidelityReport full = fidelity_sweep(scene, p, phis, BaselineVariant::full);
  const FidelityReport scaled = fidelity_sweep(scene, p, phis, BaselineVariant::scaled);
  CHECK(full.ours.front() == 0.0);
  CHECK(full.ours == scaled.ours);
  for (std::size_t i = 1; i < phis.size(); ++i) {
    CHECK(full.ours[i] > full.ours[i - 1]);
    // The baseline does not depend on phi.
    CHECK(full.baseline[i] == full.baseline[0]);
    CHECK(scaled.baseline[i] < full.baseline[i]);
  }
  CHECK(full.ours[1] < full.baseline[1]);
  CHECK(full.to_csv().find("phi") == 0);
}

TEST_CASE("scaling bench runs and validates its input") {
  BenchOptions opt;
  opt.width = opt.height = 128;
  const ScalingReport r = bench_scaling({20, 40}, opt);
  CHECK(r.counts == std::vector<int>{20, 40});
  for (const auto& s : r.seconds) {
    CHECK(s.outlierness > 0.0);
    CHECK(s.normal_map > 0.0);
    CHECK(s.lighting > 0.0);
  }
  CHECK(r.outlierness_ratio(20, 40));
  CHECK_FALSE(r.outlierness_ratio(20, 80));
  CHECK_THROWS(bench_scaling({40, 20}, opt));
  CHECK_THROWS(bench_scaling({40}, opt));
  opt.repeats = 2;
  CHECK_THROWS(bench_scaling({20, 40}, opt));
}
