#include "lidarsynth/primitives.hpp"

#include <algorithm>
#include <cmath>

#include "lidarsynth/error.hpp"

namespace lidarsynth {

namespace {

// Keeps the smallest candidate inside the open interval (t_min, t_max).
class Nearest {
 public:
  Nearest(double t_min, double t_max) : t_min_(t_min), best_(t_max) {}

  void offer(double t) {
    if (t > t_min_ && t < best_) {
      best_ = t;
      hit_ = true;
    }
  }

  std::optional<double> result() const {
    return hit_ ? std::optional<double>(best_) : std::nullopt;
  }

 private:
  double t_min_;
  double best_;
  bool hit_ = false;
};

// Roots of |o + t d - c|^2 = r^2 with d unit length.
int sphere_roots(const Ray& ray, const Vec3& center, double radius, double roots[2]) {
  const Vec3 oc = ray.origin - center;
  const double b = oc.dot(ray.dir);
  const double c = oc.squaredNorm() - radius * radius;
  const double disc = b * b - c;
  if (disc < 0.0) return 0;
  const double s = std::sqrt(disc);
  roots[0] = -b - s;
  roots[1] = -b + s;
  return 2;
}

// Lateral surface of the infinite cylinder around axis a-b. Writes roots and
// their axial coordinates (dot with b-a, so 0 at a and |b-a|^2 at b).
int tube_roots(const Ray& ray, const Vec3& a, const Vec3& b, double radius, double roots[2],
               double axial[2]) {
  const Vec3 ba = b - a;
  const Vec3 oc = ray.origin - a;
  const double baba = ba.dot(ba);
  const double bard = ba.dot(ray.dir);
  const double baoc = ba.dot(oc);
  const double k2 = baba - bard * bard;
  if (k2 <= 1e-14 * baba) return 0;  // ray parallel to the axis
  const double k1 = baba * oc.dot(ray.dir) - baoc * bard;
  const double k0 = baba * oc.dot(oc) - baoc * baoc - radius * radius * baba;
  const double h = k1 * k1 - k2 * k0;
  if (h < 0.0) return 0;
  const double s = std::sqrt(h);
  roots[0] = (-k1 - s) / k2;
  roots[1] = (-k1 + s) / k2;
  axial[0] = baoc + roots[0] * bard;
  axial[1] = baoc + roots[1] * bard;
  return 2;
}

}  // namespace

std::optional<double> intersect(const Ray& ray, const Sphere& s, double t_min, double t_max) {
  Nearest n(t_min, t_max);
  double roots[2];
  const int k = sphere_roots(ray, s.center, s.radius, roots);
  for (int i = 0; i < k; ++i) n.offer(roots[i]);
  return n.result();
}

std::optional<double> intersect(const Ray& ray, const Capsule& c, double t_min, double t_max) {
  Nearest n(t_min, t_max);
  const Vec3 ba = c.b - c.a;
  const double baba = ba.dot(ba);

  double roots[2];
  double axial[2];
  int k = tube_roots(ray, c.a, c.b, c.radius, roots, axial);
  for (int i = 0; i < k; ++i) {
    if (axial[i] >= 0.0 && axial[i] <= baba) n.offer(roots[i]);
  }
  // Hemispherical end caps: only the half facing away from the segment.
  for (const auto& [end, outward] : {std::pair{c.a, -1.0}, std::pair{c.b, 1.0}}) {
    k = sphere_roots(ray, end, c.radius, roots);
    for (int i = 0; i < k; ++i) {
      const Vec3 p = ray.origin + roots[i] * ray.dir;
      if (outward * (p - end).dot(ba) >= 0.0) n.offer(roots[i]);
    }
  }
  return n.result();
}

std::optional<double> intersect(const Ray& ray, const Cylinder& c, double t_min, double t_max) {
  Nearest n(t_min, t_max);
  const Vec3 ba = c.b - c.a;
  const double baba = ba.dot(ba);

  double roots[2];
  double axial[2];
  const int k = tube_roots(ray, c.a, c.b, c.radius, roots, axial);
  for (int i = 0; i < k; ++i) {
    if (axial[i] > 0.0 && axial[i] < baba) n.offer(roots[i]);
  }

  const double bard = ba.dot(ray.dir);
  if (bard != 0.0) {
    const double baoc = ba.dot(ray.origin - c.a);
    for (double cap : {0.0, baba}) {
      const double t = (cap - baoc) / bard;
      const Vec3 p = ray.origin + t * ray.dir - (cap == 0.0 ? c.a : c.b);
      const double axial_part = p.dot(ba);
      const double radial2 = p.squaredNorm() - axial_part * axial_part / baba;
      if (radial2 <= c.radius * c.radius) n.offer(t);
    }
  }
  return n.result();
}

std::optional<double> intersect(const Ray& ray, const Box& b, double t_min, double t_max) {
  double t_enter = -kInfinity;
  double t_exit = kInfinity;
  for (int axis = 0; axis < 3; ++axis) {
    const double o = ray.origin[axis];
    const double d = ray.dir[axis];
    if (d == 0.0) {
      if (o < b.min[axis] || o > b.max[axis]) return std::nullopt;
      continue;
    }
    double t0 = (b.min[axis] - o) / d;
    double t1 = (b.max[axis] - o) / d;
    if (t0 > t1) std::swap(t0, t1);
    t_enter = std::max(t_enter, t0);
    t_exit = std::min(t_exit, t1);
    if (t_enter > t_exit) return std::nullopt;
  }
  Nearest n(t_min, t_max);
  n.offer(t_enter);
  n.offer(t_exit);
  return n.result();
}

std::optional<double> intersect(const Ray& ray, const Plane& p, double t_min, double t_max) {
  const double denom = p.normal.dot(ray.dir);
  if (std::abs(denom) < 1e-15) return std::nullopt;
  Nearest n(t_min, t_max);
  n.offer((p.offset - p.normal.dot(ray.origin)) / denom);
  return n.result();
}

std::optional<double> intersect(const Ray& ray, const Triangle& tri, double t_min,
                                double t_max) {
  // Moller-Trumbore, two-sided.
  const Vec3 e1 = tri.b - tri.a;
  const Vec3 e2 = tri.c - tri.a;
  const Vec3 pvec = ray.dir.cross(e2);
  const double det = e1.dot(pvec);
  if (std::abs(det) < 1e-15) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 tvec = ray.origin - tri.a;
  const double u = tvec.dot(pvec) * inv;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 qvec = tvec.cross(e1);
  const double v = ray.dir.dot(qvec) * inv;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  Nearest n(t_min, t_max);
  n.offer(e2.dot(qvec) * inv);
  return n.result();
}

std::optional<double> intersect(const Ray& ray, const Mesh& m, double t_min, double t_max) {
  if (m.triangles.empty()) return std::nullopt;
  // Slab test with the interval itself; a box hit outside (t_min, t_max) is
  // still a reason to skip the triangles.
  {
    double t_enter = t_min;
    double t_exit = t_max;
    for (int axis = 0; axis < 3; ++axis) {
      const double d = ray.dir[axis];
      const double o = ray.origin[axis];
      if (d == 0.0) {
        if (o < m.bounds.min[axis] || o > m.bounds.max[axis]) return std::nullopt;
        continue;
      }
      double t0 = (m.bounds.min[axis] - o) / d;
      double t1 = (m.bounds.max[axis] - o) / d;
      if (t0 > t1) std::swap(t0, t1);
      t_enter = std::max(t_enter, t0);
      t_exit = std::min(t_exit, t1);
      if (t_enter > t_exit) return std::nullopt;
    }
  }
  double best = t_max;
  bool hit = false;
  for (const Triangle& tri : m.triangles) {
    if (auto t = intersect(ray, tri, t_min, best)) {
      best = *t;
      hit = true;
    }
  }
  return hit ? std::optional<double>(best) : std::nullopt;
}

std::optional<double> intersect(const Ray& ray, const Primitive& p, double t_min, double t_max) {
  return std::visit([&](const auto& shape) { return intersect(ray, shape, t_min, t_max); }, p);
}

namespace {

Vec3 unit_normal(const Triangle& t) { return (t.b - t.a).cross(t.c - t.a).normalized(); }

bool projects_inside(const Triangle& t, const Vec3& p) {
  const Vec3 n = (t.b - t.a).cross(t.c - t.a);
  const double area2 = n.squaredNorm();
  if (area2 == 0.0) return false;
  const double tol = -1e-9;
  const double w0 = (t.c - t.b).cross(p - t.b).dot(n) / area2;
  const double w1 = (t.a - t.c).cross(p - t.c).dot(n) / area2;
  const double w2 = (t.b - t.a).cross(p - t.a).dot(n) / area2;
  return w0 >= tol && w1 >= tol && w2 >= tol;
}

std::uint32_t argmin(std::initializer_list<double> values) {
  std::uint32_t best = 0;
  std::uint32_t i = 0;
  double lo = std::numeric_limits<double>::infinity();
  for (double v : values) {
    if (v < lo) {
      lo = v;
      best = i;
    }
    ++i;
  }
  return best;
}

}  // namespace

std::uint32_t surface_part(const Primitive& shape, const Vec3& p) {
  if (const auto* b = std::get_if<Box>(&shape)) {
    return argmin({std::abs(p.x() - b->min.x()), std::abs(p.x() - b->max.x()),
                   std::abs(p.y() - b->min.y()), std::abs(p.y() - b->max.y()),
                   std::abs(p.z() - b->min.z()), std::abs(p.z() - b->max.z())});
  }
  if (const auto* c = std::get_if<Cylinder>(&shape)) {
    const Vec3 axis = c->b - c->a;
    const double len = axis.norm();
    const double s = (p - c->a).dot(axis) / len;
    const double radial = ((p - c->a) - s * axis / len).norm();
    return argmin({std::abs(radial - c->radius), std::abs(s), std::abs(s - len)});
  }
  if (const auto* m = std::get_if<Mesh>(&shape)) {
    std::size_t hit = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m->triangles.size(); ++i) {
      const Triangle& t = m->triangles[i];
      const double d = std::abs(unit_normal(t).dot(p - t.a));
      if (d < best && projects_inside(t, p)) {
        best = d;
        hit = i;
      }
    }
    if (m->triangles.empty()) return 0;
    const Triangle& h = m->triangles[hit];
    const Vec3 n = unit_normal(h);
    for (std::size_t j = 0; j < hit; ++j) {
      const Triangle& t = m->triangles[j];
      if (unit_normal(t).dot(n) > 1.0 - 1e-9 && std::abs(n.dot(t.a - h.a)) < 1e-9) {
        return static_cast<std::uint32_t>(j);
      }
    }
    return static_cast<std::uint32_t>(hit);
  }
  return 0;
}

Mesh make_mesh(std::vector<Triangle> triangles) {
  Mesh m;
  m.triangles = std::move(triangles);
  if (m.triangles.empty()) {
    m.bounds = Box{Vec3::Zero(), Vec3::Zero()};
    return m;
  }
  Vec3 lo = m.triangles.front().a;
  Vec3 hi = lo;
  for (const Triangle& t : m.triangles) {
    for (const Vec3* v : {&t.a, &t.b, &t.c}) {
      lo = lo.cwiseMin(*v);
      hi = hi.cwiseMax(*v);
    }
  }
  m.bounds = Box{lo, hi};
  return m;
}

Mesh make_quad(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return make_mesh({Triangle{a, b, c}, Triangle{a, c, d}});
}

Mesh make_prism(const std::vector<Eigen::Vector2d>& profile_xy, double z0, double z1) {
  if (profile_xy.size() < 3) {
    throw InvalidArgument("make_prism: profile needs at least three vertices");
  }
  std::vector<Triangle> tris;
  const std::size_t n = profile_xy.size();
  auto at = [&](std::size_t i, double z) {
    return Vec3(profile_xy[i].x(), profile_xy[i].y(), z);
  };
  // Fan-triangulated end faces (profile is convex).
  for (std::size_t i = 1; i + 1 < n; ++i) {
    tris.push_back({at(0, z0), at(i, z0), at(i + 1, z0)});
    tris.push_back({at(0, z1), at(i + 1, z1), at(i, z1)});
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    tris.push_back({at(i, z0), at(j, z0), at(j, z1)});
    tris.push_back({at(i, z0), at(j, z1), at(i, z1)});
  }
  return make_mesh(std::move(tris));
}

}  // namespace lidarsynth
