#include "lineglow/service.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

#include <httplib.h>

namespace lineglow {

namespace {

Response json_response(int status, const Json& body) { return {status, "application/json", body.dump()}; }

Response error_response(int status, const std::string& field, const std::string& message) {
  Json body{{"error", message}};
  if (!field.empty()) body["field"] = field;
  return json_response(status, body);
}

Response png_response(const Bytes& png) { return {200, "image/png", std::string(png.begin(), png.end())}; }

const char* colormap_name(ColormapKind k) { return k == ColormapKind::multi_hue ? "multi" : "single"; }
const char* lighting_name(LightingMode m) {
  switch (m) {
    case LightingMode::adaptive: return "adaptive";
    case LightingMode::fixed_global: return "fixed";
    default: return "manual";
  }
}

template <typename Enum>
Enum parse_choice(const Json& v, const std::string& key, std::initializer_list<std::pair<const char*, Enum>> choices) {
  const auto s = v.get<std::string>();
  for (const auto& [name, value] : choices) {
    if (s == name) return value;
  }
  throw std::invalid_argument("unknown value '" + s + "' for " + key);
}

ClusterLight parse_cluster_light(const Json& j, ClusterLight light) {
  if (!j.is_object()) throw std::invalid_argument("must be an object");
  for (const auto& [k, v] : j.items()) {
    if (k == "azimuth") light.azimuth_deg = v.get<double>();
    else if (k == "elevation") light.elevation_deg = v.get<double>();
    else if (k == "center") light.center_deg = v.get<double>();
    else if (k == "sector") light.half_width_deg = v.get<double>();
    else throw std::invalid_argument("unknown key " + k);
  }
  return light;
}

}  // namespace

Json params_to_json(const RenderParams& p) {
  Json j{{"mu", p.mu},
         {"sigma", p.sigma},
         {"eta", p.eta},
         {"eta_high", p.effective_eta_high()},
         {"phi", p.phi},
         {"kernel", p.kernel_n},
         {"bandwidth", p.bandwidth_h},
         {"band_radius", p.effective_band_radius()},
         {"colormap", colormap_name(p.colormap)},
         {"density_scale", p.density_scale == DensityScale::log ? "log" : "linear"},
         {"lighting", lighting_name(p.lighting)},
         {"azimuth", p.global_azimuth_deg},
         {"elevation", p.global_elevation_deg},
         {"shading", p.shading == ShadingSpace::luminance_only ? "lab" : "rgb-baseline"},
         {"baseline", p.baseline == BaselineVariant::full ? "full" : "scaled"}};
  Json lights = Json::object();
  for (const auto& [c, l] : p.cluster_lights) {
    lights[std::to_string(c)] = {
        {"azimuth", l.azimuth_deg}, {"elevation", l.elevation_deg}, {"center", l.center_deg}, {"sector", l.half_width_deg}};
  }
  j["cluster_lights"] = lights;
  return j;
}

std::optional<ParamError> apply_params_json(RenderParams& params, const Json& delta) {
  if (!delta.is_object()) return ParamError{"body", "must be a JSON object"};
  RenderParams p = params;
  for (const auto& [key, v] : delta.items()) {
    try {
      if (key == "mu") p.mu = v.get<double>();
      else if (key == "sigma") p.sigma = v.get<double>();
      else if (key == "eta") p.eta = v.get<double>();
      else if (key == "eta_high") p.eta_high = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
      else if (key == "phi") p.phi = v.get<double>();
      else if (key == "kernel") {
        if (!v.is_number_integer()) return ParamError{key, "must be an integer"};
        p.kernel_n = v.get<int>();
      } else if (key == "bandwidth") p.bandwidth_h = v.get<double>();
      else if (key == "band_radius") {
        if (v.is_null()) p.band_radius.reset();
        else if (!v.is_number_integer()) return ParamError{key, "must be an integer"};
        else p.band_radius = v.get<int>();
      } else if (key == "colormap") {
        p.colormap = parse_choice<ColormapKind>(v, key, {{"multi", ColormapKind::multi_hue},
                                                         {"single", ColormapKind::single_hue_per_cluster}});
      } else if (key == "density_scale") {
        p.density_scale = parse_choice<DensityScale>(v, key, {{"log", DensityScale::log}, {"linear", DensityScale::linear}});
      } else if (key == "lighting") {
        p.lighting = parse_choice<LightingMode>(v, key, {{"adaptive", LightingMode::adaptive},
                                                         {"fixed", LightingMode::fixed_global},
                                                         {"manual", LightingMode::per_cluster_manual}});
      } else if (key == "azimuth") p.global_azimuth_deg = v.get<double>();
      else if (key == "elevation") p.global_elevation_deg = v.get<double>();
      else if (key == "shading") {
        p.shading = parse_choice<ShadingSpace>(v, key, {{"lab", ShadingSpace::luminance_only},
                                                        {"rgb-baseline", ShadingSpace::direct_rgb_baseline}});
      } else if (key == "baseline") {
        p.baseline = parse_choice<BaselineVariant>(v, key, {{"full", BaselineVariant::full},
                                                            {"scaled", BaselineVariant::scaled}});
      } else if (key == "cluster_lights") {
        if (!v.is_object()) return ParamError{key, "must be an object keyed by cluster"};
        for (const auto& [ck, lj] : v.items()) {
          int cluster = 0;
          const auto [ptr, ec] = std::from_chars(ck.data(), ck.data() + ck.size(), cluster);
          if (ec != std::errc{} || ptr != ck.data() + ck.size()) return ParamError{key, "cluster keys must be integers"};
          const auto it = p.cluster_lights.find(cluster);
          try {
            p.cluster_lights[cluster] = parse_cluster_light(lj, it == p.cluster_lights.end() ? ClusterLight{} : it->second);
          } catch (const std::exception& e) {
            return ParamError{key + "." + ck, e.what()};
          }
        }
      } else {
        return ParamError{key, "unknown parameter"};
      }
    } catch (const Json::exception&) {
      return ParamError{key, "wrong type"};
    } catch (const std::invalid_argument& e) {
      return ParamError{key, e.what()};
    }
  }
  if (auto err = validate(p)) return err;
  params = std::move(p);
  return std::nullopt;
}

RenderParams load_params_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw std::runtime_error(std::string("invalid config JSON: ") + e.what());
  }
  RenderParams p;
  if (auto err = apply_params_json(p, j)) throw std::runtime_error("config " + err->field + ": " + err->message);
  return p;
}

// ---------------------------------------------------------------------------

Session::Session(Dataset dataset, RenderParams defaults, std::optional<Colormap> colormap)
    : dataset_(std::move(dataset)), colormap_(std::move(colormap)), params_(std::move(defaults)) {
  if (auto err = validate(params_)) throw std::invalid_argument(err->field + ": " + err->message);
  std::lock_guard lock(render_mutex_);
  scene_for(SceneKey::from(params_));
}

Session::Snapshot Session::snapshot() const {
  std::lock_guard lock(state_mutex_);
  return {params_, epoch_};
}

std::uint64_t Session::epoch() const {
  std::lock_guard lock(state_mutex_);
  return epoch_;
}

RenderParams Session::params() const {
  std::lock_guard lock(state_mutex_);
  return params_;
}

const Scene& Session::scene_for(const SceneKey& key) {
  if (!scene_ || !(scene_->key == key)) {
    scene_ = std::make_unique<Scene>(build_scene(dataset_, key));
    ++outlierness_runs_;
    frame_epoch_.reset();
  }
  return *scene_;
}

const Frame& Session::frame_for(const Snapshot& snap) {
  const Scene& scene = scene_for(SceneKey::from(snap.params));
  if (frame_epoch_ != snap.epoch) {
    frame_ = render(scene, snap.params, colormap_ ? &*colormap_ : nullptr);
    frame_epoch_ = snap.epoch;
    ++renders_;
  }
  return frame_;
}

Response Session::meta() {
  const Snapshot snap = snapshot();
  Json hist;
  {
    std::lock_guard lock(render_mutex_);
    hist = score_histogram(scene_for(SceneKey::from(snap.params)).index, 20);
  }
  Json body{{"width", dataset_.width},
            {"height", dataset_.height},
            {"lines", dataset_.lines.size()},
            {"clusters", dataset_.clusters()},
            {"outlierness_histogram", hist},
            {"epoch", snap.epoch},
            {"params", params_to_json(snap.params)}};
  return json_response(200, body);
}

Response Session::post_params(const std::string& body) {
  Json delta;
  try {
    delta = Json::parse(body);
  } catch (const Json::exception&) {
    return error_response(400, "body", "invalid JSON");
  }
  std::lock_guard lock(state_mutex_);
  if (auto err = apply_params_json(params_, delta)) return error_response(400, err->field, err->message);
  ++epoch_;
  return json_response(200, Json{{"epoch", epoch_}});
}

Response Session::render_png(std::optional<std::uint64_t> epoch) {
  // Renders run one at a time; a request that waited here sees whatever epoch is current now.
  std::lock_guard lock(render_mutex_);
  const Snapshot snap = snapshot();
  if (epoch && *epoch != snap.epoch) {
    return error_response(409, "epoch", "requested epoch " + std::to_string(*epoch) + ", current is " +
                                            std::to_string(snap.epoch));
  }
  return png_response(encode_png(frame_for(snap).image));
}

Response Session::normals_png() {
  std::lock_guard lock(render_mutex_);
  return png_response(encode_normals_png(frame_for(snapshot()).normals.structure));
}

Response Session::intensity_png() {
  std::lock_guard lock(render_mutex_);
  return png_response(encode_intensity_png(frame_for(snapshot()).lighting.intensity.grid));
}

Response Session::post_light(const std::string& body) {
  Json j;
  try {
    j = Json::parse(body);
  } catch (const Json::exception&) {
    return error_response(400, "body", "invalid JSON");
  }
  if (!j.is_object() || !j.contains("cluster") || !j["cluster"].is_number_integer()) {
    return error_response(400, "cluster", "integer cluster id required");
  }
  const int cluster = j["cluster"].get<int>();
  const auto clusters = dataset_.clusters();
  if (std::find(clusters.begin(), clusters.end(), cluster) == clusters.end()) {
    return error_response(404, "cluster", "unknown cluster " + std::to_string(cluster));
  }
  std::lock_guard lock(state_mutex_);
  RenderParams p = params_;
  const auto it = p.cluster_lights.find(cluster);
  ClusterLight light = it == p.cluster_lights.end() ? ClusterLight{} : it->second;
  Json fields = j;
  fields.erase("cluster");
  try {
    light = parse_cluster_light(fields, light);
  } catch (const Json::exception&) {
    return error_response(400, "light", "wrong type");
  } catch (const std::invalid_argument& e) {
    return error_response(400, "light", e.what());
  }
  p.cluster_lights[cluster] = light;
  p.lighting = LightingMode::per_cluster_manual;
  if (auto err = validate(p)) return error_response(400, err->field, err->message);
  params_ = std::move(p);
  ++epoch_;
  return json_response(200, Json{{"epoch", epoch_}, {"azimuth", light.azimuth_deg}, {"elevation", light.elevation_deg}});
}

Response Session::handle(const std::string& method, const std::string& path,
                         const std::map<std::string, std::string>& query, const std::string& body) {
  auto expect = [&](const char* m) { return method == m; };
  try {
    if (path == "/meta") return expect("GET") ? meta() : error_response(405, "", "method not allowed");
    if (path == "/params") return expect("POST") ? post_params(body) : error_response(405, "", "method not allowed");
    if (path == "/light") return expect("POST") ? post_light(body) : error_response(405, "", "method not allowed");
    if (path == "/render.png") {
      if (!expect("GET")) return error_response(405, "", "method not allowed");
      std::optional<std::uint64_t> epoch;
      if (auto it = query.find("epoch"); it != query.end()) {
        std::uint64_t e = 0;
        const auto& s = it->second;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), e);
        if (ec != std::errc{} || ptr != s.data() + s.size()) return error_response(400, "epoch", "not an integer");
        epoch = e;
      }
      return render_png(epoch);
    }
    if (path == "/layers/normals.png") return expect("GET") ? normals_png() : error_response(405, "", "method not allowed");
    if (path == "/layers/intensity.png") {
      return expect("GET") ? intensity_png() : error_response(405, "", "method not allowed");
    }
  } catch (const std::exception& e) {
    return error_response(500, "", e.what());
  }
  return error_response(404, "", "no such endpoint");
}

bool serve(Session& session, const ServeOptions& options) {
  httplib::Server server;
  auto bridge = [&session](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query;
    for (const auto& [k, v] : req.params) query.emplace(k, v);
    const Response r = session.handle(req.method, req.path, query, req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  for (const char* path : {"/meta", "/render.png", "/layers/normals.png", "/layers/intensity.png"}) server.Get(path, bridge);
  for (const char* path : {"/params", "/light"}) server.Post(path, bridge);
  if (options.ui_dir && !server.set_mount_point("/ui", options.ui_dir->string())) return false;
  return server.listen(options.host, options.port);
}

}  // namespace lineglow
