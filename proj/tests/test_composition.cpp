#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "lineglow/composition.hpp"
#include "lineglow/image_io.hpp"
#include "lineglow/pipeline.hpp"
#include "lineglow/synthetic.hpp"

using namespace lineglow;

namespace {

IntensityMap ramp_intensity(int w, int h, double lo, double hi) {
  IntensityMap I;
  I.grid = ScalarGrid(w, h);
  for (std::size_t i = 0; i < I.grid.size(); ++i) I.grid[i] = lo + (hi - lo) * double(i) / double(I.grid.size() - 1);
  I.i_min = lo;
  I.i_empty = hi;
  return I;
}

ColorImage solid(int w, int h, Rgb8 c) {
  ColorImage img(w, h, c);
  for (auto& e : img.empty.values()) e = 0;
  return img;
}

Scene corridor_scene() {
  return build_scene(dataset_in_grid_space(synthetic::corridor_lines(300, 160, 160, 4), 160, 160), SceneKey{});
}

}  // namespace

TEST_CASE("scale_intensity endpoints") {
  const IntensityMap I = ramp_intensity(4, 4, 0.3, 0.8);
  const ScalarGrid s = scale_intensity(I, -20.0);
  CHECK(s[0] == doctest::Approx(-20.0));
  CHECK(s[15] == doctest::Approx(0.0));
  const ScalarGrid zero_phi = scale_intensity(I, 0.0);
  for (double v : zero_phi.values()) CHECK(v == 0.0);
  IntensityMap flat = I;
  flat.i_min = flat.i_empty;
  const ScalarGrid flat_field = scale_intensity(flat, -20.0);
  for (double v : flat_field.values()) CHECK(v == 0.0);
}

TEST_CASE("lightness shift keeps a and b") {
  const Rgb8 gray{128, 128, 128};
  const ColorImage base = solid(1, 1, gray);
  const ColorImage out = compose_luminance(base, ScalarGrid(1, 1, -20.0), CompositionSpace::lab_multi_hue);
  const Lab before = to_lab(gray), after = to_lab(out.pixels[0]);
  CHECK(before.l == doctest::Approx(53.59).epsilon(1e-3));
  CHECK(after.l == doctest::Approx(before.l - 20.0).epsilon(0.01));
  CHECK(std::abs(after.a) < 0.5);
  CHECK(std::abs(after.b) < 0.5);
}

TEST_CASE("zero shift and empty pixels leave the image untouched") {
  const Scene scene = corridor_scene();
  RenderParams p;
  const Frame f = render(scene, p);
  for (auto space : {CompositionSpace::lab_multi_hue, CompositionSpace::hcl_single_hue}) {
    const ColorImage same = compose_luminance(f.base, ScalarGrid(f.base.width(), f.base.height(), 0.0), space);
    CHECK(same == f.base);
  }
  for (std::size_t i = 0; i < f.base.pixels.size(); ++i) {
    if (f.base.empty[i]) {
      REQUIRE(f.image.pixels[i] == kBackground);
      REQUIRE(f.base.pixels[i] == kBackground);
    }
  }
}

TEST_CASE("unclamped pixels keep their chromatic coordinates") {
  const Scene scene = corridor_scene();
  RenderParams p;
  p.phi = -20.0;
  const Frame f = render(scene, p);
  std::size_t checked = 0;
  for (std::size_t i = 0; i < f.base.pixels.size(); ++i) {
    if (f.base.empty[i] || f.clamp_mask[i]) continue;
    const Lab a = to_lab(f.base.pixels[i]), b = to_lab(f.image.pixels[i]);
    REQUIRE(std::abs(a.a - b.a) <= 0.5);
    REQUIRE(std::abs(a.b - b.b) <= 0.5);
    ++checked;
  }
  CHECK(checked > 1000);
}

TEST_CASE("more negative phi never shrinks the lightness shift") {
  const IntensityMap I = ramp_intensity(8, 8, 0.2, 0.9);
  ScalarGrid prev = scale_intensity(I, 0.0);
  for (double phi = -5.0; phi >= -40.0; phi -= 5.0) {
    const ScalarGrid cur = scale_intensity(I, phi);
    for (std::size_t i = 0; i < cur.size(); ++i) REQUIRE(std::abs(cur[i]) >= std::abs(prev[i]));
    prev = cur;
  }
}

TEST_CASE("RGB baseline") {
  const ColorImage base = solid(4, 4, {200, 100, 50});
  IntensityMap ones;
  ones.grid = ScalarGrid(4, 4, 1.0);
  CHECK(baseline_rgb_lambert(base, ones) == base);
  IntensityMap zeros;
  zeros.grid = ScalarGrid(4, 4, 0.0);
  const ColorImage black = baseline_rgb_lambert(base, zeros);
  for (const auto& c : black.pixels.values()) CHECK(c == Rgb8{0, 0, 0});
  const ColorImage half = baseline_rgb_lambert(base, zeros, BaselineVariant::scaled);
  CHECK(half.pixels[0] == Rgb8{100, 50, 25});
  ColorImage with_empty = base;
  with_empty.empty[3] = 1;
  with_empty.pixels[3] = kBackground;
  CHECK(baseline_rgb_lambert(with_empty, zeros).pixels[3] == kBackground);
}

TEST_CASE("colormap lookup and validation") {
  const Colormap cm = Colormap::default_multi_hue();
  CHECK_NOTHROW(cm.validate());
  CHECK(cm.lookup(0.0) == cm.stops.front().color);
  CHECK(cm.lookup(1.0) == cm.stops.back().color);
  CHECK(cm.lookup(-3.0) == cm.stops.front().color);
  CHECK(Colormap::viridis().lookup(1.0) == Rgb8{253, 231, 37});
  // Lightness rises along the default map.
  for (std::size_t i = 1; i < cm.stops.size(); ++i) CHECK(to_lab(cm.stops[i].color).l > to_lab(cm.stops[i - 1].color).l);

  Colormap bad = cm;
  bad.stops.front().t = 0.1;
  CHECK_THROWS_AS(bad.validate(), ColormapError);
  bad = cm;
  std::swap(bad.stops[2], bad.stops[3]);
  CHECK_THROWS_AS(bad.validate(), ColormapError);
}

TEST_CASE("colormap JSON") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto good = dir / "lineglow_cm_good.json", bad = dir / "lineglow_cm_bad.json";
  std::ofstream(good) << R"({"stops": [[0, [0, 0, 0]], [0.5, [10, 20, 30]], [1, [255, 255, 255]]], "scale": "linear"})";
  std::ofstream(bad) << R"({"stops": [[0, [0, 0, 0]], [0.7, [10, 20, 300]], [1, [255, 255, 255]]]})";
  const Colormap cm = Colormap::load_json(good);
  CHECK(cm.stops.size() == 3);
  CHECK(cm.scale == DensityScale::linear);
  CHECK(cm.lookup(0.25) == Rgb8{5, 10, 15});
  CHECK_THROWS_AS(Colormap::load_json(bad), ColormapError);
  CHECK_THROWS_AS(Colormap::load_json(dir / "lineglow_missing.json"), ColormapError);
}

TEST_CASE("density normalization and mapping") {
  CHECK(normalize_density(0.0, 2.0, DensityScale::linear) == 0.0);
  CHECK(normalize_density(2.0, 2.0, DensityScale::log) == doctest::Approx(1.0));
  CHECK(normalize_density(1.0, 2.0, DensityScale::log) == doctest::Approx(std::log(2.0) / std::log(3.0)));
  DensityField F;
  F.grid = ScalarGrid(3, 1, 0.0);
  F.grid[1] = 0.5;
  F.grid[2] = 1.0;
  const ColorImage img = map_density(F, Colormap::default_multi_hue());
  CHECK(img.empty[0] == 1);
  CHECK(img.pixels[0] == kBackground);
  CHECK(img.pixels[2] == Colormap::default_multi_hue().stops.back().color);
  CHECK(img.non_empty_count() == 2);
}

TEST_CASE("single-hue maps keep each cluster's hue") {
  DensityField F;
  F.grid = ScalarGrid(8, 2, 0.0);
  Grid<std::int32_t> clusters(8, 2, -1);
  for (int c = 0; c < 8; ++c) {
    F.grid(c, 0) = F.grid(c, 1) = 0.1 + 0.1 * c;
    clusters(c, 0) = 0;
    clusters(c, 1) = 1;
  }
  const Colormap cm = Colormap::single_hue({0, 1});
  const ColorImage img = map_density(F, cm, &clusters);
  for (int c = 0; c < 8; ++c) {
    for (int r = 0; r < 2; ++r) {
      const Hcl hcl = to_hcl(img.pixels(c, r));
      if (hcl.c < 5.0) continue;  // hue is unstable at low chroma
      double diff = std::fmod(std::abs(hcl.h - cm.hue_for(r)), 360.0);
      diff = std::min(diff, 360.0 - diff);
      CHECK(diff < 2.0);
    }
  }
}

TEST_CASE("PNG round trip") {
  ColorImage img(5, 3);
  img.pixels(1, 2) = {1, 2, 3};
  img.pixels(4, 0) = {250, 0, 128};
  const Bytes png = encode_png(img);
  CHECK(png.size() > 8);
  CHECK(png[1] == 'P');
  CHECK(decode_png_rgb(png) == img.pixels);
  CHECK_THROWS_AS(decode_png_rgb(Bytes{1, 2, 3}), ImageIoError);
  CHECK(encode_png(img) == png);
  const ScalarGrid g(3, 2, 0.25);
  CHECK(encode_float_grid(g).size() == 24);
}
