#pragma once

// Analytic scene model and the exact / proxy ray casters.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lidarsynth/classes.hpp"
#include "lidarsynth/geometry.hpp"
#include "lidarsynth/primitives.hpp"

namespace lidarsynth {

/// An annotated object. Its primitives are expressed in the local frame of
/// `box` (origin at the box centre, x along the length, y down, z along the
/// width), so `box` doubles as the entity's pose.
struct Entity {
  EntityId id = 1;
  ObjectClass cls = ObjectClass::Car;
  std::string model;
  double speed = 0.0;  // m/s
  OrientedBox3D box;
  std::vector<Primitive> detailed;
  /// Simplified collision shape; ray casting against proxies uses it when present.
  std::optional<std::vector<Primitive>> proxy;
};

/// Unannotated world geometry, expressed in the sensor frame.
struct StaticElement {
  Primitive shape;
  StencilClass cls = StencilClass::Ground;
};

/// Everything is expressed in the frame of the co-located camera/LiDAR origin.
struct Scene {
  std::string name;
  std::vector<Entity> entities;
  std::vector<StaticElement> statics;

  const Entity* find(EntityId id) const;
};

/// Throws InvalidArgument on duplicate or out-of-range entity IDs.
void validate_scene(const Scene& scene);

struct RayHit {
  double range = 0.0;
  /// Entity ID, or the stencil code of the static element that was hit.
  std::uint32_t label = 0;
  /// Index into scene.statics for static hits, or kEntitySurfaceBase +
  /// entity index * 256 + primitive index for entity hits. Identifies the
  /// exact surface for consistency checks.
  std::uint32_t surface = 0;
  /// Smooth face within that surface (see surface_part).
  std::uint32_t part = 0;

  bool is_entity() const { return is_entity_code(label); }
};

inline constexpr std::uint32_t kEntitySurfaceBase = 0x10000000u;

struct RaycastOptions {
  /// Intersect proxy geometry instead of detailed geometry where an entity has one.
  bool use_proxy = false;
  /// Entity hits farther than this are ignored (static geometry is unaffected).
  std::optional<double> entity_range_limit;
  double t_min = 0.0;
  double t_max = kInfinity;
};

/// Nearest intersection along a ray from the sensor origin.
std::optional<RayHit> raycast(const Scene& scene, const Vec3& dir,
                              const RaycastOptions& options = {});

/// Exact oracle: detailed geometry, no entity range limit.
std::optional<RayHit> raycast_exact(const Scene& scene, const Vec3& dir);

inline constexpr double kDefaultProxyRangeLimit = 30.0;

/// Proxy geometry with the entity range limit (default 30 m).
std::optional<RayHit> raycast_proxy(const Scene& scene, const Vec3& dir,
                                    std::optional<double> entity_range_limit =
                                        kDefaultProxyRangeLimit);

// ---------------------------------------------------------------------------
// Built-in scenes

/// Numeric overrides for built-in scene parameters, keyed by name.
using SceneParams = std::map<std::string, double>;

/// Names accepted by make_builtin_scene.
std::vector<std::string> builtin_scene_names();

/// Throws InvalidArgument for an unknown name or parameter. `seed` is only
/// used by "random".
Scene make_builtin_scene(std::string_view name, const SceneParams& params = {},
                         std::uint64_t seed = 0);

/// Height of the sensor above flat ground (metres).
inline constexpr double kSensorHeight = 1.73;

Scene make_wall_scene(double z = 20.0);
/// Near surface over x < 0 at z = near_z, far plane at z = near_z * ratio.
Scene make_two_plane_step_scene(double near_z = 20.0, double ratio = 1.2);
Scene make_sphere_scene(double radius = 2.0, double distance = 20.0, double wall_z = 30.0);
Scene make_street_basic_scene();
/// Flat ground up to `start_z`, then an incline of `slope_deg`, with a car
/// parked on the incline and pitched to match it.
Scene make_slope_scene(double slope_deg = 10.0, double start_z = 6.0, double car_z = 13.0);

struct RandomSceneOptions {
  int min_cars = 4;
  int max_cars = 10;
  int min_pedestrians = 2;
  int max_pedestrians = 8;
  int max_cyclists = 2;
  int max_large_vehicles = 2;
  bool buildings = true;
};

Scene make_random_scene(std::uint64_t seed, const RandomSceneOptions& options = {});

// Entity builders (local-frame geometry plus proxy) used by the built-in scenes.
Entity make_car(EntityId id, const Vec3& bottom_center, double yaw, std::string model = "ingot",
                double speed = 0.0, double pitch = 0.0, double roll = 0.0);
Entity make_large_vehicle(EntityId id, ObjectClass cls, const Vec3& bottom_center, double yaw,
                          std::string model, double speed = 0.0);
Entity make_pedestrian(EntityId id, const Vec3& bottom_center, double yaw,
                       std::string model = "walker_a", double speed = 0.0);
Entity make_cyclist(EntityId id, const Vec3& bottom_center, double yaw,
                    std::string model = "bmx", double speed = 0.0);

// ---------------------------------------------------------------------------
// Scene description files (JSON, schema version 1; see docs/data_format.md)

inline constexpr int kSceneFileVersion = 1;

std::string scene_to_json(const Scene& scene);
/// Throws FormatError on malformed input or an unsupported version.
Scene scene_from_json(std::string_view text);
Scene load_scene_file(const std::filesystem::path& path);
void save_scene_file(const Scene& scene, const std::filesystem::path& path);

}  // namespace lidarsynth
