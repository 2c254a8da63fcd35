#include <doctest.h>

#include <numbers>
#include <random>

#include "lineglow/density.hpp"
#include "lineglow/synthetic.hpp"
#include "oracles.hpp"

using namespace lineglow;

namespace {

RasterizedLine raster(std::vector<Vec2> v, int w = 48, int h = 48, int id = 0) {
  return rasterize(Polyline{id, std::move(v), {}}, 3, w, h);
}

ScalarGrid dense(const SparseField& f) {
  ScalarGrid g(f.width, f.height, 0.0);
  accumulate(g, f);
  return g;
}

}  // namespace

TEST_CASE("gaussian kernel") {
  CHECK(gaussian(0.0, 1.0) == doctest::Approx(1.0 / (2.0 * std::numbers::pi)));
  CHECK(gaussian(2.0, 2.0) == doctest::Approx(std::exp(-0.5) / (8.0 * std::numbers::pi)));
  // The discrete sum over a large window integrates to ~1.
  double s = 0.0;
  for (int y = -20; y <= 20; ++y) {
    for (int x = -20; x <= 20; ++x) s += gaussian(std::hypot(x, y), 1.5);
  }
  CHECK(s == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(default_band_radius(1.0) == 5);
  CHECK(default_band_radius(2.1) == 7);
  CHECK(kernel_cutoff(1.0) >= 4);
}

TEST_CASE("single-pixel line has density N_h(d)") {
  const auto line = raster({{20, 20}, {20.2, 20.1}});
  REQUIRE(line.pixels.size() == 1);
  const auto f = line_density(line, 1.0, 5);
  for (const auto& [idx, v] : f.cells) {
    const int col = static_cast<int>(idx % 48), row = static_cast<int>(idx / 48);
    CHECK(v == doctest::Approx(gaussian(std::hypot(col - 20, row - 20), 1.0)).epsilon(1e-12));
  }
  CHECK(f.at(20 * 48 + 20) == doctest::Approx(gaussian(0.0, 1.0)));
  // Outside the band there is nothing.
  CHECK(f.at(20 * 48 + 26) == 0.0);
  CHECK(f.at(20 * 48 + 25) > 0.0);
}

TEST_CASE("line density matches the exhaustive oracle") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(4.0, 43.0);
  for (double h : {0.7, 1.0, 2.0}) {
    for (int trial = 0; trial < 4; ++trial) {
      const Polyline poly{0, {{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}}, {}};
      const auto line = rasterize(poly, 3, 48, 48);
      const int band = default_band_radius(h);
      const ScalarGrid got = dense(line_density(line, h, band));
      const ScalarGrid want = oracle::line_density(poly, line, h, band);
      const double peak = gaussian(0.0, h);
      for (std::size_t i = 0; i < got.size(); ++i) {
        // Kernels beyond the cutoff are dropped; each is below 1e-4 of the peak.
        REQUIRE(std::abs(got[i] - want[i]) <= 1e-4 * peak);
        if (got[i] > 0.0) REQUIRE(want[i] > 0.0);
      }
    }
  }
}

TEST_CASE("nearest band agrees with exhaustive search, earliest pixel on ties") {
  const auto line = raster({{5, 5}, {30, 18}, {12, 40}});
  const auto band = nearest_band(line, 6);
  std::size_t expected_cells = 0;
  for (int row = 0; row < 48; ++row) {
    for (int col = 0; col < 48; ++col) {
      const std::size_t k = oracle::nearest(line, {col, row});
      if (oracle::dist2(line.pixels[k], {col, row}) <= 36) ++expected_cells;
    }
  }
  REQUIRE(band.size() == expected_cells);
  for (const auto& c : band) {
    const Pixel p{static_cast<int>(c.pixel % 48), static_cast<int>(c.pixel / 48)};
    const std::size_t k = oracle::nearest(line, p);
    REQUIRE(c.nearest == k);
    REQUIRE(c.d2 == oracle::dist2(line.pixels[k], p));
  }
}

TEST_CASE("aggregate is the ordered sum of per-line fields") {
  const auto polylines = synthetic::random_lines(30, 96, 96, 21);
  std::vector<RasterizedLine> lines;
  for (const auto& l : polylines) lines.push_back(rasterize(l, 3, 96, 96));
  const DensityField F = aggregate(lines, 1.0, 5);
  ScalarGrid sum(96, 96, 0.0);
  for (const auto& l : lines) accumulate(sum, line_density(l, 1.0, 5));
  CHECK(F.grid == sum);
  CHECK(F.per_line_max.size() == lines.size());
  CHECK(F.max_value() > 0.0);
}

TEST_CASE("density is translation-equivariant away from borders") {
  const auto a = raster({{10, 10}, {25, 17}, {20, 30}}, 64, 64);
  const auto b = raster({{17, 13}, {32, 20}, {27, 33}}, 64, 64);
  const ScalarGrid fa = dense(line_density(a, 1.2, 5)), fb = dense(line_density(b, 1.2, 5));
  for (int row = 0; row + 3 < 64; ++row) {
    for (int col = 0; col + 7 < 64; ++col) REQUIRE(fb(col + 7, row + 3) == doctest::Approx(fa(col, row)).epsilon(1e-12));
  }
}

TEST_CASE("each segment carries unit mass") {
  auto mass = [](const RasterizedLine& l) {
    double m = 0;
    for (const auto& [i, v] : line_density(l, 1.0, 5).cells) m += v;
    return m;
  };
  // Length does not matter, the number of segments does.
  CHECK(mass(raster({{10, 24}, {20, 24}})) == doctest::Approx(1.0).epsilon(0.01));
  CHECK(mass(raster({{10, 24}, {30, 24}})) == doctest::Approx(1.0).epsilon(0.01));
  CHECK(mass(raster({{10, 24}, {20, 24}, {30, 24}})) == doctest::Approx(2.0).epsilon(0.01));
  CHECK(mass(raster({{10, 10}, {30, 10}, {30, 30}, {10, 30}})) == doctest::Approx(3.0).epsilon(0.01));
}

TEST_CASE("segment weights") {
  // Two 11-pixel segments sharing the corner pixel.
  const auto l = raster({{10, 10}, {20, 10}, {20, 20}});
  REQUIRE(l.pixels.size() == 21);
  CHECK(l.weights.front() == doctest::Approx(1.0 / 11));
  CHECK(l.weights[10] == doctest::Approx(2.0 / 11));
  // A clipped segment keeps the weight of its full walk.
  const auto clipped = raster({{-10, 5}, {9, 5}}, 48, 48);
  CHECK(clipped.pixels.size() == 10);
  CHECK(clipped.weights.front() == doctest::Approx(1.0 / 20));
}

TEST_CASE("aggregate rejects datasets with no pixels") {
  CHECK_THROWS(aggregate({}, 1.0, 5));
}
