#include "lidarsynth/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lidarsynth/error.hpp"

namespace lidarsynth {

double wrap_angle(double radians) {
  double wrapped = std::remainder(radians, 2.0 * kPi);
  // std::remainder maps odd multiples of pi to -pi or +pi; both are in range.
  return wrapped;
}

Mat3 rotation_y(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Mat3 r;
  r << c, 0, s,
       0, 1, 0,
      -s, 0, c;
  return r;
}

Mat3 rotation_x(double phi) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  Mat3 r;
  r << 1, 0, 0,
       0, c, -s,
       0, s, c;
  return r;
}

Mat3 rotation_z(double psi) {
  const double c = std::cos(psi);
  const double s = std::sin(psi);
  Mat3 r;
  r << c, -s, 0,
       s, c, 0,
       0, 0, 1;
  return r;
}

Vec3 make_ray(double theta, double phi) {
  return rotation_y(theta) * rotation_x(phi) * Vec3::UnitZ();
}

Camera::Camera(double fov_v, int width, int height, double near_clip, double far_clip)
    : fov_v_(fov_v), width_(width), height_(height), near_(near_clip), far_(far_clip) {
  if (!(fov_v > 0.0 && fov_v < kPi)) {
    throw InvalidArgument("camera: vertical field of view must lie in (0, pi)");
  }
  if (width < 2 || height < 2) {
    throw InvalidArgument("camera: image must be at least 2x2 pixels");
  }
  if (!(near_clip > 0.0) || !(far_clip > near_clip)) {
    throw InvalidArgument("camera: clip planes must satisfy 0 < near < far");
  }
  clip_ = clipping_plane_dims(*this);
  focal_u_ = near_ * (width_ - 1) / clip_.width;
  focal_v_ = near_ * (height_ - 1) / clip_.height;
}

Camera Camera::from_horizontal_fov(double fov_h, int width, int height, double near_clip,
                                   double far_clip) {
  if (!(fov_h > 0.0 && fov_h < kPi) || width < 2 || height < 2) {
    throw InvalidArgument("camera: invalid horizontal field of view or image size");
  }
  const double aspect = static_cast<double>(width) / height;
  const double fov_v = 2.0 * std::atan(std::tan(0.5 * fov_h) / aspect);
  return Camera(fov_v, width, height, near_clip, far_clip);
}

Camera Camera::dataset_default() {
  return from_horizontal_fov(deg_to_rad(90.0), 1920, 1080, 0.15, 600.0);
}

bool Camera::in_image(PixelCoord px) const {
  return px.u >= 0.0 && px.u <= width_ - 1 && px.v >= 0.0 && px.v <= height_ - 1;
}

bool Camera::in_image(Pixel px) const {
  return px.u >= 0 && px.u < width_ && px.v >= 0 && px.v < height_;
}

ClipPlaneDims clipping_plane_dims(const Camera& camera) {
  const double nc_h = 2.0 * camera.near_clip() * std::tan(0.5 * camera.fov_v());
  return {camera.aspect() * nc_h, nc_h};
}

PixelCoord project(const Vec3& dir, const Camera& camera) {
  if (!(dir.z() > 0.0)) {
    throw InvalidArgument("project: direction points behind the camera");
  }
  return {camera.center_u() + camera.focal_u() * dir.x() / dir.z(),
          camera.center_v() + camera.focal_v() * dir.y() / dir.z()};
}

Vec3 pixel_direction(PixelCoord px, const Camera& camera) {
  return Vec3((px.u - camera.center_u()) / camera.focal_u(),
              (px.v - camera.center_v()) / camera.focal_v(), 1.0)
      .normalized();
}

Vec3 unproject(PixelCoord px, double range, const Camera& camera) {
  if (!(range > 0.0)) {
    throw InvalidArgument("unproject: range must be positive");
  }
  if (!std::isfinite(px.u) || !std::isfinite(px.v)) {
    throw InvalidArgument("unproject: pixel coordinate is not finite");
  }
  return pixel_direction(px, camera) * range;
}

NearSquare get_near(PixelCoord px, const Camera& camera) {
  if (!camera.in_image(px)) {
    throw InvalidArgument("get_near: pixel (" + std::to_string(px.u) + ", " +
                          std::to_string(px.v) + ") is outside the image");
  }
  const int u0 = std::clamp(static_cast<int>(std::floor(px.u)), 0, camera.width() - 2);
  const int v0 = std::clamp(static_cast<int>(std::floor(px.v)), 0, camera.height() - 2);

  NearSquare sq;
  sq.base = {u0, v0};
  sq.frac_u = px.u - u0;
  sq.frac_v = px.v - v0;
  sq.by_distance = {Pixel{u0, v0}, Pixel{u0 + 1, v0}, Pixel{u0, v0 + 1}, Pixel{u0 + 1, v0 + 1}};

  auto dist2 = [&](const Pixel& p) {
    const double du = px.u - p.u;
    const double dv = px.v - p.v;
    return du * du + dv * dv;
  };
  std::sort(sq.by_distance.begin(), sq.by_distance.end(), [&](const Pixel& a, const Pixel& b) {
    const double da = dist2(a);
    const double db = dist2(b);
    if (da != db) return da < db;
    if (a.v != b.v) return a.v < b.v;
    return a.u < b.u;
  });
  return sq;
}

Mat3 box_rotation(double yaw, double pitch, double roll) {
  return rotation_y(yaw) * rotation_z(-pitch) * rotation_x(roll);
}

Mat3 OrientedBox3D::rotation() const { return box_rotation(yaw, pitch, roll); }

Vec3 OrientedBox3D::to_local(const Vec3& world) const {
  return rotation().transpose() * (world - center);
}

Vec3 OrientedBox3D::to_world(const Vec3& local) const { return center + rotation() * local; }

Vec3 OrientedBox3D::bottom_center() const { return to_world(Vec3(0.0, 0.5 * h, 0.0)); }

std::array<Vec3, 8> OrientedBox3D::corners() const {
  const Mat3 r = rotation();
  std::array<Vec3, 8> out;
  int i = 0;
  for (double sx : {-1.0, 1.0}) {
    for (double sy : {-1.0, 1.0}) {
      for (double sz : {-1.0, 1.0}) {
        out[i++] = center + r * Vec3(sx * 0.5 * l, sy * 0.5 * h, sz * 0.5 * w);
      }
    }
  }
  return out;
}

OrientedBox3D OrientedBox3D::inflated(double margin) const {
  OrientedBox3D b = *this;
  b.h += 2.0 * margin;
  b.w += 2.0 * margin;
  b.l += 2.0 * margin;
  return b;
}

OrientedBox3D OrientedBox3D::yaw_only() const {
  OrientedBox3D b = *this;
  b.pitch = 0.0;
  b.roll = 0.0;
  return b;
}

OrientedBox3D box_from_bottom_center(const Vec3& bottom_center, double h, double w, double l,
                                     double yaw, double pitch, double roll) {
  OrientedBox3D b;
  b.h = h;
  b.w = w;
  b.l = l;
  b.yaw = yaw;
  b.pitch = pitch;
  b.roll = roll;
  b.center = bottom_center - b.rotation() * Vec3(0.0, 0.5 * h, 0.0);
  return b;
}

bool point_in_oriented_box(const Vec3& p, const OrientedBox3D& box, double tol) {
  const Vec3 q = box.to_local(p);
  return std::abs(q.x()) <= 0.5 * box.l + tol && std::abs(q.y()) <= 0.5 * box.h + tol &&
         std::abs(q.z()) <= 0.5 * box.w + tol;
}

}  // namespace lidarsynth
