#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "lidarsynth/annotator.hpp"
#include "lidarsynth/geometry.hpp"
#include "lidarsynth/lidar.hpp"
#include "lidarsynth/scene.hpp"

namespace lidarsynth::tools {

struct CameraConfig {
  int width = 1920;
  int height = 1080;
  double fov_h_deg = 90.0;  // horizontal; the vertical FoV follows from the aspect ratio
  double near_clip = 0.15;
  double far_clip = 600.0;

  Camera make() const;
};

/// Everything a run depends on. A run is reproducible from this plus `seed`.
struct RunConfig {
  std::string scene = "street-basic";
  std::optional<std::filesystem::path> scene_file;  // overrides `scene`
  SceneParams scene_params;
  CameraConfig camera;
  LidarConfig lidar;  // lidar.seed is ignored; noise seeds derive from `seed`
  bool noise = true;
  std::optional<double> proxy_limit = kDefaultProxyRangeLimit;
  LabelOptions labels;
  bool color = true;
  std::filesystem::path output = "lidarsynth_out";
  int frames = 1;
  std::uint64_t seed = 0;
  int workers = 0;  // 0 = hardware concurrency; never affects output

  /// Throws InvalidArgument on inconsistent values.
  void validate() const;

  /// Scene for a frame: "random" uses seed + frame, others ignore the frame.
  Scene make_scene(std::size_t frame) const;
  /// Lidar settings for a frame (noise toggle and per-frame noise seed applied).
  LidarConfig lidar_for(std::size_t frame) const;
};

/// Serialized form; `output` and `workers` are omitted when `for_manifest`.
nlohmann::json to_json(const RunConfig& config, bool for_manifest = false);
/// Applies the keys present in `j` on top of `base`. Unknown keys are an error.
RunConfig from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace lidarsynth::tools
