#include <doctest.h>

#include "lineglow/pipeline.hpp"
#include "lineglow/structure_normals.hpp"
#include "lineglow/synthetic.hpp"

using namespace lineglow;

namespace {

Scene small_scene(int n = 40, std::uint64_t seed = 5) {
  const Dataset ds = dataset_in_grid_space(synthetic::random_lines(n, 128, 128, seed), 128, 128);
  return build_scene(ds, SceneKey{});
}

OutlierIndex index_with_normalized(std::vector<double> normalized) {
  OutlierIndex idx;
  for (std::size_t i = 0; i < normalized.size(); ++i) idx.line_ids.push_back(static_cast<int>(i));
  idx.normalized = std::move(normalized);
  return idx;
}

}  // namespace

TEST_CASE("selection size is round(sigma * n), ordered by closeness to mu") {
  const auto idx = index_with_normalized({0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(select_lines(idx, 0.5, 0.0).selected.empty());
  CHECK(select_lines(idx, 0.5, 1.0).selected.size() == 5);
  CHECK(select_lines(idx, 0.5, 0.5).selected.size() == 3);  // 2.5 rounds up
  CHECK(select_lines(idx, 1.0, 0.4).selected == std::vector<std::size_t>{4, 3});
  CHECK(select_lines(idx, 0.0, 0.2).selected == std::vector<std::size_t>{0});
  // Equal distance to mu: the smaller line id goes first.
  CHECK(select_lines(idx, 0.375, 0.4).selected == std::vector<std::size_t>{1, 2});
}

TEST_CASE("flat density gives vertical low-frequency normals for any eta") {
  const ScalarGrid flat(32, 24, 0.37);
  for (double eta : {0.5, 1.0, 3.0, 10.0}) {
    const NormalGrid n = low_freq_normals(flat, eta);
    for (const auto& v : n.normals.values()) REQUIRE(v == Vec3{0.0, 0.0, 1.0});
    for (const auto& p : n.provenance.values()) REQUIRE(p == kProvenanceLow);
  }
}

TEST_CASE("low-frequency normal on a ramp") {
  ScalarGrid ramp(9, 9);
  for (int r = 0; r < 9; ++r) {
    for (int c = 0; c < 9; ++c) ramp(c, r) = 0.2 * c;
  }
  const NormalGrid n = low_freq_normals(ramp, 2.0);
  const Vec3 want = normalized(Vec3{-0.2, 0.0, 0.5});
  CHECK(n.normals(4, 4).x == doctest::Approx(want.x));
  CHECK(n.normals(4, 4).z == doctest::Approx(want.z));
  // One-sided difference at the border uses the same slope here.
  CHECK(n.normals(0, 4).x == doctest::Approx(want.x));
  CHECK(n.provenance(0, 0) == kProvenanceEmpty);  // F == 0 at column 0
  // Larger eta flattens less: the normal tilts more.
  CHECK(low_freq_normals(ramp, 10.0).normals(4, 4).z < n.normals(4, 4).z);
}

TEST_CASE("sigma = 0 composes to the low-frequency map bitwise") {
  const Scene scene = small_scene();
  RenderParams p;
  p.sigma = 0.0;
  const NormalStage st = compute_normals(scene, p);
  CHECK(st.selection.empty());
  for (const auto v : st.high.provenance.values()) REQUIRE(v < 0);
  CHECK(st.structure.normals == st.low.normals);
  CHECK(st.structure.provenance == st.low.provenance);
}

TEST_CASE("high-frequency map covers exactly the selected footprints") {
  const Scene scene = small_scene();
  RenderParams p;
  p.sigma = 0.3;
  p.mu = 0.8;
  const NormalStage st = compute_normals(scene, p);
  Grid<std::uint8_t> covered(scene.width, scene.height, 0);
  for (std::size_t li : st.selection.selected) {
    for (const Pixel px : scene.lines[li].footprint) covered(px.col, px.row) = 1;
  }
  for (std::size_t i = 0; i < covered.size(); ++i) {
    REQUIRE(bool(covered[i]) == st.high.is_high(i));
    if (st.high.is_high(i)) {
      REQUIRE(st.structure.normals[i] == st.high.normals[i]);
    } else {
      REQUIRE(st.structure.normals[i] == st.low.normals[i]);
    }
  }
}

TEST_CASE("each high-frequency pixel takes the covering line with smallest (delta, distance, id)") {
  const Scene scene = small_scene(30, 12);
  RenderParams p;
  p.sigma = 0.6;
  p.mu = 0.4;
  const NormalStage st = compute_normals(scene, p);
  for (int row = 0; row < scene.height; ++row) {
    for (int col = 0; col < scene.width; ++col) {
      std::optional<std::tuple<double, std::uint32_t, int, std::size_t>> best;
      for (std::size_t li : st.selection.selected) {
        const auto& fp = scene.lines[li].footprint;
        if (!std::binary_search(fp.begin(), fp.end(), Pixel{col, row},
                                [](Pixel a, Pixel b) { return std::pair(a.row, a.col) < std::pair(b.row, b.col); })) {
          continue;
        }
        const BandCell* c = scene.fields[li].find(col, row);
        REQUIRE(c);
        const auto key = std::tuple(st.selection.delta[li], c->d2, scene.lines[li].line_id, li);
        if (!best || key < *best) best = key;
      }
      if (!best) {
        REQUIRE(st.high.provenance(col, row) == kProvenanceEmpty);
      } else {
        REQUIRE(st.high.provenance(col, row) == static_cast<std::int32_t>(std::get<3>(*best)));
      }
    }
  }
}

TEST_CASE("high-frequency normals point away from the line") {
  // One horizontal line: pixels just above it tilt upward (negative y), below tilt downward.
  const Dataset ds = dataset_in_grid_space({{0, {{10, 20}, {50, 20}}, {}}, {1, {{10, 40}, {50, 40}}, {}}}, 64, 64);
  const Scene scene = build_scene(ds, SceneKey{});
  RenderParams p;
  p.sigma = 1.0;
  const NormalStage st = compute_normals(scene, p);
  CHECK(st.high.is_high(st.high.normals.index(30, 19)));
  CHECK(st.high.normals(30, 19).y < 0.0);
  CHECK(st.high.normals(30, 21).y > 0.0);
  CHECK(st.high.normals(30, 20).y == doctest::Approx(0.0));
  CHECK(st.high.normals(30, 20).z == doctest::Approx(1.0));
}

TEST_CASE("footprint field radius covers the kernel window and stencil") {
  CHECK(footprint_field_radius(3, 5) == 5);
  CHECK(footprint_field_radius(9, 5) == 7);
  CHECK(footprint_field_radius(31, 5) >= 23);
}
