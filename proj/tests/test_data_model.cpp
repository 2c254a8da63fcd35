#include <doctest.h>

#include <random>
#include <set>

#include "lineglow/data_model.hpp"

using namespace lineglow;

namespace {

bool eight_connected(const std::vector<Pixel>& px) {
  for (std::size_t i = 1; i < px.size(); ++i) {
    if (std::abs(px[i].col - px[i - 1].col) > 1 || std::abs(px[i].row - px[i - 1].row) > 1) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("csv ingest with header, clusters and letterbox") {
  const std::string csv =
      "line_id,x,y,cluster\n"
      "1,0,0,2\n"
      "1,10,0,2\n"
      "2,0,5,0\n"
      "2,10,5,0\n";
  const Dataset ds = ingest_text(csv, InputFormat::csv, 101, 101, 0.0);
  REQUIRE(ds.lines.size() == 2);
  CHECK(ds.lines[0].cluster == 2);
  CHECK(ds.clusters() == std::vector<int>{0, 2});
  // 10 x 5 data box into a 100 x 100 usable square: scale 10, centered vertically.
  CHECK(ds.transform.scale == doctest::Approx(10.0));
  const auto g = ds.grid_lines();
  CHECK(g[0].vertices[0].x == doctest::Approx(0.0));
  CHECK(g[0].vertices[1].x == doctest::Approx(100.0));
  // y = 0 is the bottom of the data, so it lands on the larger row.
  CHECK(g[0].vertices[0].y == doctest::Approx(75.0));
  CHECK(g[1].vertices[0].y == doctest::Approx(25.0));
}

TEST_CASE("csv without header and with CRLF") {
  const Dataset ds = ingest_text("7,0,0\r\n7,1,1\r\n", InputFormat::csv, 64, 64);
  REQUIRE(ds.lines.size() == 1);
  CHECK(ds.lines[0].id == 7);
  CHECK_FALSE(ds.lines[0].cluster.has_value());
}

TEST_CASE("csv errors name the row") {
  CHECK_THROWS_WITH_AS(ingest_text("1,0,0\n1,abc,0\n", InputFormat::csv, 64, 64), "row 2: bad x", IngestError);
  CHECK_THROWS_WITH_AS(ingest_text("1,0,0\n2,0,0\n2,1,1\n1,3,3\n", InputFormat::csv, 64, 64),
                       "row 4: rows of line 1 are not contiguous", IngestError);
  CHECK_THROWS_AS(ingest_text("1,0,0,1\n1,1,1,2\n", InputFormat::csv, 64, 64), IngestError);
  CHECK_THROWS_AS(ingest_text("1,0\n", InputFormat::csv, 64, 64), IngestError);
  CHECK_THROWS_AS(ingest_text("1,0,0,-1\n1,2,2,-1\n", InputFormat::csv, 64, 64), IngestError);
}

TEST_CASE("degenerate lines are dropped with a warning; empty dataset is an error") {
  const Dataset ds = ingest_text("1,0,0\n1,0,0\n2,0,0\n2,5,5\n", InputFormat::csv, 64, 64);
  CHECK(ds.lines.size() == 1);
  CHECK(ds.warnings.size() == 1);
  CHECK_THROWS_AS(ingest_text("1,3,3\n1,3,3\n", InputFormat::csv, 64, 64), IngestError);
  CHECK_THROWS_AS(ingest_text("", InputFormat::csv, 64, 64), IngestError);
}

TEST_CASE("json ingest") {
  const std::string js = R"([{"id": 3, "cluster": 1, "points": [[0,0],[4,2],[8,0]]}, {"id": 4, "points": [[0,1],[8,1]]}])";
  const Dataset ds = ingest_text(js, InputFormat::json, 64, 64);
  REQUIRE(ds.lines.size() == 2);
  CHECK(ds.lines[0].vertices.size() == 3);
  CHECK(ds.lines[0].cluster == 1);
  CHECK_FALSE(ds.lines[1].cluster);
  CHECK_THROWS_AS(ingest_text(R"({"id": 1})", InputFormat::json, 64, 64), IngestError);
  CHECK_THROWS_AS(ingest_text(R"([{"id": 1, "points": [[0]]}])", InputFormat::json, 64, 64), IngestError);
  CHECK_THROWS_AS(ingest_text(R"([{"id": 1, "points": [[0,0],[1,1]]}, {"id": 1, "points": [[0,0],[2,2]]}])",
                              InputFormat::json, 64, 64),
                  IngestError);
}

TEST_CASE("grid and margin bounds") {
  std::vector<Polyline> l{{1, {{0, 0}, {1, 1}}, {}}};
  CHECK_THROWS_AS(fit_to_grid(l, 8, 64), IngestError);
  CHECK_THROWS_AS(fit_to_grid(l, 64, 64, 0.5), IngestError);
  const Dataset ds = fit_to_grid(l, 200, 100, 0.1);
  const auto g = ds.grid_lines();
  // Square data into a 200x100 grid with a 10 px margin: limited by height.
  CHECK(g[0].vertices[0].y == doctest::Approx(89.0));
  CHECK(g[0].vertices[1].y == doctest::Approx(10.0));
  CHECK((g[0].vertices[0].x + g[0].vertices[1].x) / 2 == doctest::Approx(99.5));
}

TEST_CASE("horizontal, vertical and diagonal segments") {
  const auto h = walk_segment({2, 3}, {6, 3});
  CHECK(h == std::vector<Pixel>{{2, 3}, {3, 3}, {4, 3}, {5, 3}, {6, 3}});
  const auto v = walk_segment({1, 5}, {1, 2});
  CHECK(v == std::vector<Pixel>{{1, 5}, {1, 4}, {1, 3}, {1, 2}});
  const auto d = walk_segment({0, 0}, {3, 3});
  CHECK(d == std::vector<Pixel>{{0, 0}, {1, 1}, {2, 2}, {3, 3}});
  CHECK(walk_segment({1.4, 1.6}, {1.4, 1.6}) == std::vector<Pixel>{{1, 2}});
}

TEST_CASE("segment walk is 8-connected and reversal-invariant") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-20.0, 60.0);
  for (int i = 0; i < 2000; ++i) {
    const Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
    auto fwd = walk_segment(a, b);
    auto bwd = walk_segment(b, a);
    REQUIRE(eight_connected(fwd));
    std::reverse(bwd.begin(), bwd.end());
    REQUIRE(fwd == bwd);
    const int expect = std::max(std::abs(int(std::floor(a.x + 0.5)) - int(std::floor(b.x + 0.5))),
                                std::abs(int(std::floor(a.y + 0.5)) - int(std::floor(b.y + 0.5)))) + 1;
    REQUIRE(int(fwd.size()) == expect);
  }
}

TEST_CASE("rasterize: deduplication, tangents, clipping and footprint") {
  // A line that doubles back over itself keeps one entry per pixel with the first tangent.
  Polyline back{1, {{2, 5}, {8, 5}, {4, 5}}, {}};
  const auto r = rasterize(back, 3, 16, 16);
  CHECK(r.pixels.size() == 7);
  for (const auto& t : r.tangents) CHECK(t == Vec2{1.0, 0.0});
  std::set<Pixel> uniq(r.pixels.begin(), r.pixels.end());
  CHECK(uniq.size() == r.pixels.size());

  Polyline out{2, {{-5, 2}, {5, 2}}, {}};
  const auto c = rasterize(out, 1, 16, 16);
  CHECK(c.pixels.size() == 6);
  CHECK(c.pixels.front() == Pixel{0, 2});

  Polyline dot{3, {{5, 5}, {5.2, 5.1}}, {}};
  const auto f = rasterize(dot, 5, 16, 16);
  CHECK(f.pixels.size() == 1);
  CHECK(f.footprint.size() == 25);
  CHECK(std::is_sorted(f.footprint.begin(), f.footprint.end(),
                       [](Pixel a, Pixel b) { return std::pair(a.row, a.col) < std::pair(b.row, b.col); }));
  const auto corner = rasterize(Polyline{4, {{0, 0}, {0.1, 0.1}}, {}}, 3, 16, 16);
  CHECK(corner.footprint.size() == 4);

  CHECK_THROWS_AS(rasterize(back, 4, 16, 16), std::invalid_argument);
}

TEST_CASE("rasterized line reversal gives the same pixel set") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 63.0);
  for (int i = 0; i < 200; ++i) {
    Polyline l{i, {{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}}, {}};
    Polyline rev = l;
    std::reverse(rev.vertices.begin(), rev.vertices.end());
    auto a = rasterize(l, 3, 64, 64).pixels, b = rasterize(rev, 3, 64, 64).pixels;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    REQUIRE(a == b);
  }
}

TEST_CASE("render params validation names the field") {
  RenderParams p;
  CHECK_FALSE(validate(p));
  p.mu = 1.5;
  CHECK(validate(p)->field == "mu");
  p = {};
  p.kernel_n = 4;
  CHECK(validate(p)->field == "kernel");
  p = {};
  p.phi = 1;
  CHECK(validate(p)->field == "phi");
  p = {};
  p.eta = 0;
  CHECK(validate(p)->field == "eta");
  p = {};
  p.bandwidth_h = -1;
  CHECK(validate(p)->field == "bandwidth");
  p = {};
  p.cluster_lights[2] = ClusterLight{200.0, 60.0, 150.0, 30.0};
  CHECK(validate(p)->field == "cluster_lights.2.azimuth");
  p.cluster_lights[2].azimuth_deg = 170.0;
  CHECK_FALSE(validate(p));
  CHECK(RenderParams{}.effective_band_radius() == 5);
  RenderParams wide;
  wide.bandwidth_h = 2.5;
  CHECK(wide.effective_band_radius() == 8);
}

TEST_CASE("sector helpers wrap around") {
  CHECK(angular_offset_deg(350, 10) == doctest::Approx(-20));
  CHECK(angular_offset_deg(10, 350) == doctest::Approx(20));
  CHECK(azimuth_in_sector({355.0, 60.0, 5.0, 15.0}));
  CHECK_FALSE(azimuth_in_sector({200.0, 60.0, 150.0, 30.0}));
  CHECK(clamp_to_sector(200, 150, 30) == doctest::Approx(180));
  CHECK(clamp_to_sector(100, 150, 30) == doctest::Approx(120));
  RenderParams p;
  p.mu = -0.2;
  p.sigma = 7;
  clamp_focus(p);
  CHECK(p.mu == 0.0);
  CHECK(p.sigma == 1.0);
}
