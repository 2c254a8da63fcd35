#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <json.hpp>

#include "lineglow/composition.hpp"
#include "lineglow/data_model.hpp"
#include "lineglow/image_io.hpp"
#include "lineglow/pipeline.hpp"

namespace lineglow {

using Json = nlohmann::json;

Json params_to_json(const RenderParams& params);

/// Applies a partial JSON object onto params. Keys: mu, sigma, eta, eta_high, phi, kernel,
/// bandwidth, band_radius, colormap (multi|single), density_scale (log|linear), lighting
/// (adaptive|fixed|manual), azimuth, elevation, shading (lab|rgb-baseline), baseline
/// (full|scaled), cluster_lights. Unknown keys and type errors are reported with the key
/// name. The result is validated; on error params is left unchanged.
std::optional<ParamError> apply_params_json(RenderParams& params, const Json& delta);

/// Reads a JSON config file of RenderParams defaults.
RenderParams load_params_file(const std::filesystem::path& path);

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// Interactive session over one dataset. The scene (rasterization, density, outlierness index)
/// is rebuilt only when kernel or bandwidth change; everything else re-renders from the cache.
/// Renders are serialized; state reads and writes are guarded by a separate lock.
class Session {
 public:
  Session(Dataset dataset, RenderParams defaults, std::optional<Colormap> colormap = std::nullopt);

  Response meta();
  Response post_params(const std::string& body);
  /// epoch: the render epoch the client expects; stale or future epochs give 409.
  Response render_png(std::optional<std::uint64_t> epoch);
  Response normals_png();
  Response intensity_png();
  Response post_light(const std::string& body);

  /// Routes a request to the handlers above; 404 for unknown paths, 405 for wrong methods.
  Response handle(const std::string& method, const std::string& path,
                  const std::map<std::string, std::string>& query, const std::string& body);

  std::uint64_t epoch() const;
  RenderParams params() const;
  /// Number of times the outlierness index has been computed.
  std::size_t outlierness_computations() const { return outlierness_runs_.load(); }
  std::size_t render_count() const { return renders_.load(); }

 private:
  struct Snapshot {
    RenderParams params;
    std::uint64_t epoch = 0;
  };
  Snapshot snapshot() const;
  /// Scene for the key, rebuilt when it differs. Caller holds render_mutex_.
  const Scene& scene_for(const SceneKey& key);
  /// Frame for the snapshot, rendering it if it is not the cached one. Caller holds render_mutex_.
  const Frame& frame_for(const Snapshot& snap);

  Dataset dataset_;
  std::optional<Colormap> colormap_;

  mutable std::mutex state_mutex_;
  RenderParams params_;
  std::uint64_t epoch_ = 0;

  std::mutex render_mutex_;
  std::unique_ptr<Scene> scene_;
  std::optional<std::uint64_t> frame_epoch_;
  Frame frame_;
  std::atomic<std::size_t> outlierness_runs_{0};
  std::atomic<std::size_t> renders_{0};
};

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::filesystem::path> ui_dir;  // static assets mounted under /ui
};

/// Blocks serving HTTP until the process is stopped. Returns false when the socket cannot be bound.
bool serve(Session& session, const ServeOptions& options);

}  // namespace lineglow
