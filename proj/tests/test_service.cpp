#include <doctest.h>

#include "lineglow/service.hpp"
#include "lineglow/synthetic.hpp"

using namespace lineglow;

namespace {

Dataset corridor() { return dataset_in_grid_space(synthetic::corridor_lines(200, 128, 128, 3), 128, 128); }

Json body_of(const Response& r) { return Json::parse(r.body); }

}  // namespace

TEST_CASE("meta describes the dataset") {
  Session s(corridor(), RenderParams{});
  const Response r = s.meta();
  REQUIRE(r.status == 200);
  const Json m = body_of(r);
  CHECK(m["width"] == 128);
  CHECK(m["lines"] == 200);
  CHECK(m["clusters"] == Json::array({0, 1, 2, 3}));
  CHECK(m["outlierness_histogram"].size() == 20);
  int total = 0;
  for (const auto& v : m["outlierness_histogram"]) total += v.get<int>();
  CHECK(total == 200);
}

TEST_CASE("parameter errors name the field and leave state alone") {
  Session s(corridor(), RenderParams{});
  const auto before = s.epoch();
  Response r = s.post_params(R"({"mu": 1.5})");
  CHECK(r.status == 400);
  CHECK(body_of(r)["field"] == "mu");
  r = s.post_params(R"({"frobnicate": 1})");
  CHECK(r.status == 400);
  CHECK(body_of(r)["field"] == "frobnicate");
  r = s.post_params("not json");
  CHECK(r.status == 400);
  CHECK(s.epoch() == before);
  r = s.post_params(R"({"phi": -10})");
  CHECK(r.status == 200);
  CHECK(body_of(r)["epoch"] == before + 1);
}

TEST_CASE("sigma = 0 serves the low-frequency-only image") {
  const Dataset ds = corridor();
  Session s(ds, RenderParams{});
  REQUIRE(s.post_params(R"({"sigma": 0})").status == 200);
  const Response got = s.render_png(s.epoch());
  REQUIRE(got.status == 200);
  CHECK(got.content_type == "image/png");

  // Assemble the expected image from the low-frequency map alone.
  RenderParams p;
  p.sigma = 0;
  const Scene scene = build_scene(ds, SceneKey::from(p));
  const NormalStage st = compute_normals(scene, p);
  const LightingStage ls = compute_lighting(scene, p, st.low);
  const ColorImage base = map_density(scene.density, colormap_for(scene, p));
  const ColorImage want = compose_luminance(base, scale_intensity(ls.intensity, p.phi), CompositionSpace::lab_multi_hue);
  const Bytes png = encode_png(want);
  CHECK(got.body == std::string(png.begin(), png.end()));
}

TEST_CASE("light requests") {
  Session s(corridor(), RenderParams{});
  Response r = s.post_light(R"({"cluster": 2, "azimuth": 200, "sector": 30, "center": 150})");
  CHECK(r.status == 400);
  CHECK(body_of(r)["field"] == "cluster_lights.2.azimuth");
  r = s.post_light(R"({"cluster": 9, "azimuth": 150})");
  CHECK(r.status == 404);
  r = s.post_light(R"({"cluster": 2, "azimuth": 160, "elevation": 45, "sector": 30, "center": 150})");
  REQUIRE(r.status == 200);
  CHECK(body_of(r)["azimuth"] == 160.0);
  CHECK(s.params().lighting == LightingMode::per_cluster_manual);
  CHECK(s.params().cluster_lights.at(2).elevation_deg == 45.0);
  CHECK(s.render_png(s.epoch()).status == 200);
}

TEST_CASE("stale epochs are rejected") {
  Session s(corridor(), RenderParams{});
  const auto e0 = s.epoch();
  REQUIRE(s.post_params(R"({"phi": -5})").status == 200);
  CHECK(s.render_png(e0).status == 409);
  CHECK(s.render_png(s.epoch() + 1).status == 409);
  CHECK(s.render_png(s.epoch()).status == 200);
  CHECK(s.render_png(std::nullopt).status == 200);
}

TEST_CASE("routing") {
  Session s(corridor(), RenderParams{});
  CHECK(s.handle("GET", "/meta", {}, "").status == 200);
  CHECK(s.handle("POST", "/meta", {}, "").status == 405);
  CHECK(s.handle("GET", "/nope", {}, "").status == 404);
  CHECK(s.handle("GET", "/render.png", {{"epoch", "abc"}}, "").status == 400);
  CHECK(s.handle("GET", "/render.png", {{"epoch", std::to_string(s.epoch())}}, "").status == 200);
  CHECK(s.handle("GET", "/layers/normals.png", {}, "").status == 200);
  CHECK(s.handle("GET", "/layers/intensity.png", {}, "").status == 200);
  CHECK(s.handle("POST", "/params", {}, R"({"eta": 2})").status == 200);
}

TEST_CASE("outlierness is computed once unless the kernel or bandwidth changes") {
  Session s(corridor(), RenderParams{});
  CHECK(s.outlierness_computations() == 1);
  for (const char* delta : {R"({"mu": 0.2})", R"({"sigma": 0.9})", R"({"eta": 5})", R"({"phi": -30})",
                            R"({"lighting": "fixed", "azimuth": 90})", R"({"shading": "rgb-baseline"})"}) {
    REQUIRE(s.post_params(delta).status == 200);
    REQUIRE(s.render_png(s.epoch()).status == 200);
  }
  CHECK(s.outlierness_computations() == 1);
  REQUIRE(s.post_params(R"({"kernel": 5})").status == 200);
  REQUIRE(s.render_png(s.epoch()).status == 200);
  CHECK(s.outlierness_computations() == 2);
}

TEST_CASE("replaying a parameter script gives identical bytes") {
  const std::vector<std::string> script{R"({"mu": 0.7, "sigma": 0.3})", R"({"phi": -25})",
                                        R"({"colormap": "single"})", R"({"bandwidth": 1.5})"};
  auto run = [&] {
    Session s(corridor(), RenderParams{});
    std::vector<std::string> images;
    for (const auto& step : script) {
      REQUIRE(s.post_params(step).status == 200);
      images.push_back(s.render_png(s.epoch()).body);
    }
    return images;
  };
  CHECK(run() == run());
}
