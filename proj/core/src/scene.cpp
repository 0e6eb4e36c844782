#include "lidarsynth/scene.hpp"

#include <set>
#include <string>

#include "lidarsynth/error.hpp"
#include "scene_internal.hpp"

namespace lidarsynth {

const Entity* Scene::find(EntityId id) const {
  for (const Entity& e : entities) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

void validate_scene(const Scene& scene) {
  std::set<EntityId> seen;
  for (const Entity& e : scene.entities) {
    if (!is_entity_code(e.id)) {
      throw InvalidArgument("scene: entity id " + std::to_string(e.id) + " is out of range");
    }
    if (!seen.insert(e.id).second) {
      throw InvalidArgument("scene: duplicate entity id " + std::to_string(e.id));
    }
    if (!(e.box.h > 0 && e.box.w > 0 && e.box.l > 0)) {
      throw InvalidArgument("scene: entity " + std::to_string(e.id) +
                            " has non-positive box dimensions");
    }
    if (e.detailed.empty()) {
      throw InvalidArgument("scene: entity " + std::to_string(e.id) + " has no geometry");
    }
  }
}

namespace detail {

PreparedScene prepare(const Scene& scene) {
  PreparedScene out;
  out.scene = &scene;
  out.entities.reserve(scene.entities.size());
  for (const Entity& e : scene.entities) {
    PreparedEntity p;
    p.entity = &e;
    p.rotation_t = e.box.rotation().transpose();
    p.center = e.box.center;
    p.bound_radius = 0.5 * std::sqrt(e.box.h * e.box.h + e.box.w * e.box.w + e.box.l * e.box.l);
    out.entities.push_back(p);
  }
  return out;
}

std::optional<double> raycast_entity(const PreparedEntity& e, const Ray& ray, double t_min,
                                     double t_max, bool use_proxy, std::size_t* primitive) {
  // Bounding-sphere rejection (with a small margin for primitives touching the box).
  const Vec3 oc = ray.origin - e.center;
  const double b = oc.dot(ray.dir);
  const double r = e.bound_radius + 1e-6;
  const double c = oc.squaredNorm() - r * r;
  const double disc = b * b - c;
  if (disc < 0.0) return std::nullopt;
  if (-b + std::sqrt(disc) <= t_min) return std::nullopt;

  const Ray local{e.rotation_t * oc, e.rotation_t * ray.dir};
  const auto& shapes =
      (use_proxy && e.entity->proxy) ? *e.entity->proxy : e.entity->detailed;
  double best = t_max;
  bool hit = false;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    if (auto t = intersect(local, shapes[i], t_min, best)) {
      best = *t;
      hit = true;
      if (primitive) *primitive = i;
    }
  }
  return hit ? std::optional<double>(best) : std::nullopt;
}

std::optional<RayHit> raycast(const PreparedScene& prepared, const Ray& ray,
                              const RaycastOptions& options) {
  const Scene& scene = *prepared.scene;
  double best = options.t_max;
  std::optional<RayHit> hit;

  for (std::size_t i = 0; i < scene.statics.size(); ++i) {
    if (auto t = intersect(ray, scene.statics[i].shape, options.t_min, best)) {
      best = *t;
      hit = RayHit{*t, stencil_code(scene.statics[i].cls), static_cast<std::uint32_t>(i),
                   surface_part(scene.statics[i].shape, ray.origin + *t * ray.dir)};
    }
  }

  for (std::size_t i = 0; i < prepared.entities.size(); ++i) {
    const PreparedEntity& e = prepared.entities[i];
    double entity_t_max = best;
    if (options.entity_range_limit) entity_t_max = std::min(best, *options.entity_range_limit);
    std::size_t prim = 0;
    if (auto t = raycast_entity(e, ray, options.t_min, entity_t_max, options.use_proxy, &prim)) {
      best = *t;
      const Vec3 local = e.rotation_t * (ray.origin + *t * ray.dir - e.center);
      const auto& shapes = (options.use_proxy && e.entity->proxy) ? *e.entity->proxy
                                                                  : e.entity->detailed;
      hit = RayHit{*t, e.entity->id,
                   kEntitySurfaceBase + static_cast<std::uint32_t>(i * 256 + prim),
                   surface_part(shapes[prim], local)};
    }
  }
  return hit;
}

}  // namespace detail

std::optional<RayHit> raycast(const Scene& scene, const Vec3& dir,
                              const RaycastOptions& options) {
  const detail::PreparedScene prepared = detail::prepare(scene);
  return detail::raycast(prepared, Ray{Vec3::Zero(), dir.normalized()}, options);
}

std::optional<RayHit> raycast_exact(const Scene& scene, const Vec3& dir) {
  return raycast(scene, dir, RaycastOptions{});
}

std::optional<RayHit> raycast_proxy(const Scene& scene, const Vec3& dir,
                                    std::optional<double> entity_range_limit) {
  RaycastOptions opts;
  opts.use_proxy = true;
  opts.entity_range_limit = entity_range_limit;
  return raycast(scene, dir, opts);
}

}  // namespace lidarsynth
