#include "lidarsynth_tools/run_config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "lidarsynth/error.hpp"

namespace lidarsynth::tools {

using nlohmann::json;

Camera CameraConfig::make() const {
  return Camera::from_horizontal_fov(deg_to_rad(fov_h_deg), width, height, near_clip, far_clip);
}

void RunConfig::validate() const {
  (void)camera.make();
  lidar.validate();
  if (frames < 1) throw InvalidArgument("frames must be at least 1");
  if (workers < 0) throw InvalidArgument("workers must be non-negative");
  if (proxy_limit && !(*proxy_limit > 0.0)) throw InvalidArgument("proxy_limit must be positive");
  if (!scene_file) {
    const auto names = builtin_scene_names();
    if (std::find(names.begin(), names.end(), scene) == names.end()) {
      throw InvalidArgument("unknown scene '" + scene + "'");
    }
  }
}

Scene RunConfig::make_scene(std::size_t frame) const {
  if (scene_file) return load_scene_file(*scene_file);
  return make_builtin_scene(scene, scene_params, seed + frame);
}

LidarConfig RunConfig::lidar_for(std::size_t frame) const {
  LidarConfig l = lidar;
  if (!noise) l.noise_sigma = 0.0;
  l.seed = seed * 0x9E3779B97F4A7C15ull + frame;
  return l;
}

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw InvalidArgument(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key)) throw InvalidArgument("unknown config key '" + where + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

json to_json(const RunConfig& c, bool for_manifest) {
  json j;
  j["scene"] = c.scene;
  if (c.scene_file) j["scene_file"] = c.scene_file->string();
  j["scene_params"] = c.scene_params;
  j["camera"] = {{"width", c.camera.width},         {"height", c.camera.height},
                 {"fov_h_deg", c.camera.fov_h_deg}, {"near", c.camera.near_clip},
                 {"far", c.camera.far_clip}};
  j["lidar"] = {{"theta_res", c.lidar.theta_res},   {"phi_res", c.lidar.phi_res},
                {"theta_min", c.lidar.theta_min},   {"theta_max", c.lidar.theta_max},
                {"phi_min", c.lidar.phi_min},       {"phi_max", c.lidar.phi_max},
                {"max_range", c.lidar.max_range},   {"gate_ratio", c.lidar.gate_ratio},
                {"noise_sigma", c.lidar.noise_sigma}};
  j["noise"] = c.noise;
  j["proxy_limit"] = c.proxy_limit ? json(*c.proxy_limit) : json(nullptr);
  j["labels"] = {{"min_pixels", c.labels.min_pixels},
                 {"occlusion_visible", c.labels.occlusion.fully_visible},
                 {"occlusion_partly", c.labels.occlusion.partly}};
  j["color"] = c.color;
  j["frames"] = c.frames;
  j["seed"] = c.seed;
  if (!for_manifest) {
    j["output"] = c.output.string();
    j["workers"] = c.workers;
  }
  return j;
}

RunConfig from_json(const json& j, RunConfig c) {
  try {
    check_keys(j,
               {"scene", "scene_file", "scene_params", "camera", "lidar", "noise", "proxy_limit",
                "labels", "color", "frames", "seed", "output", "workers"},
               "");
    read(j, "scene", c.scene);
    if (j.contains("scene_file")) {
      if (j["scene_file"].is_null()) c.scene_file.reset();
      else c.scene_file = j["scene_file"].get<std::string>();
    }
    if (j.contains("scene_params")) {
      for (const auto& [k, v] : j["scene_params"].items()) c.scene_params[k] = v.get<double>();
    }
    if (j.contains("camera")) {
      const json& cj = j["camera"];
      check_keys(cj, {"width", "height", "fov_h_deg", "near", "far"}, "camera.");
      read(cj, "width", c.camera.width);
      read(cj, "height", c.camera.height);
      read(cj, "fov_h_deg", c.camera.fov_h_deg);
      read(cj, "near", c.camera.near_clip);
      read(cj, "far", c.camera.far_clip);
    }
    if (j.contains("lidar")) {
      const json& lj = j["lidar"];
      check_keys(lj,
                 {"theta_res", "phi_res", "theta_min", "theta_max", "phi_min", "phi_max",
                  "max_range", "gate_ratio", "noise_sigma"},
                 "lidar.");
      read(lj, "theta_res", c.lidar.theta_res);
      read(lj, "phi_res", c.lidar.phi_res);
      read(lj, "theta_min", c.lidar.theta_min);
      read(lj, "theta_max", c.lidar.theta_max);
      read(lj, "phi_min", c.lidar.phi_min);
      read(lj, "phi_max", c.lidar.phi_max);
      read(lj, "max_range", c.lidar.max_range);
      read(lj, "gate_ratio", c.lidar.gate_ratio);
      read(lj, "noise_sigma", c.lidar.noise_sigma);
    }
    read(j, "noise", c.noise);
    if (j.contains("proxy_limit")) {
      if (j["proxy_limit"].is_null()) c.proxy_limit.reset();
      else c.proxy_limit = j["proxy_limit"].get<double>();
    }
    if (j.contains("labels")) {
      const json& lj = j["labels"];
      check_keys(lj, {"min_pixels", "occlusion_visible", "occlusion_partly"}, "labels.");
      read(lj, "min_pixels", c.labels.min_pixels);
      read(lj, "occlusion_visible", c.labels.occlusion.fully_visible);
      read(lj, "occlusion_partly", c.labels.occlusion.partly);
    }
    read(j, "color", c.color);
    read(j, "frames", c.frames);
    read(j, "seed", c.seed);
    if (j.contains("output")) c.output = j["output"].get<std::string>();
    read(j, "workers", c.workers);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument("config " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

}  // namespace lidarsynth::tools
