#pragma once

// Precomputed per-entity transforms shared by the ray casters and renderer.

#include <vector>

#include "lidarsynth/scene.hpp"

namespace lidarsynth::detail {

struct PreparedEntity {
  const Entity* entity = nullptr;
  Mat3 rotation_t;      // world -> local
  Vec3 center;
  double bound_radius;  // bounding sphere of the box
};

struct PreparedScene {
  const Scene* scene = nullptr;
  std::vector<PreparedEntity> entities;
};

PreparedScene prepare(const Scene& scene);

std::optional<RayHit> raycast(const PreparedScene& prepared, const Ray& ray,
                              const RaycastOptions& options);

/// Nearest hit on a single entity's detailed geometry.
std::optional<double> raycast_entity(const PreparedEntity& e, const Ray& ray, double t_min,
                                     double t_max, bool use_proxy, std::size_t* primitive = nullptr);

}  // namespace lidarsynth::detail
