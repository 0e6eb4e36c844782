#pragma once

// Analytic ray-intersection kernels for the scene's primitive shapes.

#include <cstdint>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "lidarsynth/geometry.hpp"

namespace lidarsynth {

struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 dir = Vec3::UnitZ();  // unit length
};

struct Sphere {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
};

/// Segment a-b swept by a sphere of `radius`.
struct Capsule {
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::UnitY();
  double radius = 0.5;
};

/// Solid cylinder with flat caps at a and b.
struct Cylinder {
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::UnitY();
  double radius = 0.5;
};

/// Axis-aligned in the frame the primitive is expressed in.
struct Box {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Ones();
};

/// Infinite two-sided plane {p : normal . p = offset}; normal is unit length.
struct Plane {
  Vec3 normal = -Vec3::UnitY();
  double offset = 0.0;
};

struct Triangle {
  Vec3 a, b, c;
};

struct Mesh {
  std::vector<Triangle> triangles;
  Box bounds;  // kept in sync by make_mesh
};

using Primitive = std::variant<Sphere, Capsule, Cylinder, Box, Plane, Mesh>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Smallest ray parameter t in (t_min, t_max) where the ray crosses the
/// primitive's surface, or nullopt.
std::optional<double> intersect(const Ray& ray, const Sphere& s, double t_min = 0.0,
                                double t_max = kInfinity);
std::optional<double> intersect(const Ray& ray, const Capsule& c, double t_min = 0.0,
                                double t_max = kInfinity);
std::optional<double> intersect(const Ray& ray, const Cylinder& c, double t_min = 0.0,
                                double t_max = kInfinity);
std::optional<double> intersect(const Ray& ray, const Box& b, double t_min = 0.0,
                                double t_max = kInfinity);
std::optional<double> intersect(const Ray& ray, const Plane& p, double t_min = 0.0,
                                double t_max = kInfinity);
std::optional<double> intersect(const Ray& ray, const Triangle& tri, double t_min = 0.0,
                                double t_max = kInfinity);
std::optional<double> intersect(const Ray& ray, const Mesh& m, double t_min = 0.0,
                                double t_max = kInfinity);
std::optional<double> intersect(const Ray& ray, const Primitive& p, double t_min = 0.0,
                                double t_max = kInfinity);

/// Index of the smooth face of `shape` that contains `point` (a point on its
/// surface, in the shape's frame). Box: 0..5 (-x, +x, -y, +y, -z, +z);
/// cylinder: 0 side, 1 cap at a, 2 cap at b; mesh: index of the first
/// triangle coplanar with the hit; sphere, capsule and plane: 0.
std::uint32_t surface_part(const Primitive& shape, const Vec3& point);

Mesh make_mesh(std::vector<Triangle> triangles);

/// Planar quad a-b-c-d (two triangles).
Mesh make_quad(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

/// Closed prism: a convex polygon in the x-y plane extruded from z0 to z1.
Mesh make_prism(const std::vector<Eigen::Vector2d>& profile_xy, double z0, double z1);

}  // namespace lidarsynth
