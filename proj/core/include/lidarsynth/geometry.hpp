#pragma once

// Sensor-frame geometry shared by every module.
//
// Frame convention: x right, y down, z forward (the KITTI camera frame).
// The camera and the LiDAR share one origin, so every position in this
// library is expressed in that frame unless a function says otherwise.

#include <array>
#include <numbers>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace lidarsynth {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle into [-pi, pi].
double wrap_angle(double radians);

/// Rotation about +y. Positive angles turn the forward axis toward +x (right).
Mat3 rotation_y(double theta);
/// Rotation about +x. Positive angles turn the forward axis toward -y (up).
Mat3 rotation_x(double phi);
/// Rotation about +z. Positive angles turn +x toward +y.
Mat3 rotation_z(double psi);

/// Unit LiDAR ray for horizontal angle theta and vertical angle phi:
/// rotation_y(theta) * rotation_x(phi) * k.
Vec3 make_ray(double theta, double phi);

struct PixelCoord {
  double u = 0.0;  // along the width
  double v = 0.0;  // along the height
};

struct Pixel {
  int u = 0;
  int v = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

struct ClipPlaneDims {
  double width = 0.0;   // nc_W, metres
  double height = 0.0;  // nc_H, metres
};

/// Perspective camera with the pinhole model used by the depth codec.
///
/// Pixel centres run from 0 to W-1 (H-1); the principal point is the image
/// centre ((W-1)/2, (H-1)/2) and the near-plane rectangle maps onto the
/// closed pixel range [0, W-1] x [0, H-1].
class Camera {
 public:
  /// Throws InvalidArgument unless 0 < fov_v < pi, near > 0, far > near and
  /// width, height >= 2.
  Camera(double fov_v, int width, int height, double near_clip, double far_clip);

  /// Builds a camera from a horizontal field of view (radians).
  static Camera from_horizontal_fov(double fov_h, int width, int height, double near_clip,
                                    double far_clip);

  /// 1920x1080, 90 degree horizontal field of view, clip planes 0.15 m / 600 m.
  static Camera dataset_default();

  double fov_v() const { return fov_v_; }
  int width() const { return width_; }
  int height() const { return height_; }
  double near_clip() const { return near_; }
  double far_clip() const { return far_; }
  double aspect() const { return static_cast<double>(width_) / height_; }

  ClipPlaneDims clip_plane() const { return clip_; }
  double focal_u() const { return focal_u_; }
  double focal_v() const { return focal_v_; }
  double center_u() const { return 0.5 * (width_ - 1); }
  double center_v() const { return 0.5 * (height_ - 1); }

  /// True iff 0 <= u <= W-1 and 0 <= v <= H-1.
  bool in_image(PixelCoord px) const;
  bool in_image(Pixel px) const;

  friend bool operator==(const Camera& a, const Camera& b) {
    return a.fov_v_ == b.fov_v_ && a.width_ == b.width_ && a.height_ == b.height_ &&
           a.near_ == b.near_ && a.far_ == b.far_;
  }

 private:
  double fov_v_;
  int width_;
  int height_;
  double near_;
  double far_;
  ClipPlaneDims clip_;
  double focal_u_;
  double focal_v_;
};

/// nc_H = 2 * nc_z * tan(fov_v / 2), nc_W = AR * nc_H.
ClipPlaneDims clipping_plane_dims(const Camera& camera);

/// Perspective projection of a direction (or point) onto fractional pixel
/// coordinates. Throws InvalidArgument when dir.z <= 0.
PixelCoord project(const Vec3& dir, const Camera& camera);

/// Unit direction of the ray through a (fractional) pixel.
Vec3 pixel_direction(PixelCoord px, const Camera& camera);

/// Point at distance `range` along the ray through `px`.
/// Throws InvalidArgument when range <= 0 or px is not finite.
Vec3 unproject(PixelCoord px, double range, const Camera& camera);

/// The 2x2 pixel square surrounding a fractional pixel.
///
/// `by_distance` holds the four pixels ordered by Euclidean distance to the
/// query (ties: smaller v, then smaller u). `base` is the square's top-left
/// pixel, and `frac_u`, `frac_v` the query's offset from it in [0, 1].
/// On integral coordinates the square extends toward +u/+v, or toward -u/-v
/// on the last column/row, so the four pixels are always distinct.
struct NearSquare {
  std::array<Pixel, 4> by_distance;
  Pixel base;
  double frac_u = 0.0;
  double frac_v = 0.0;

  Pixel nearest() const { return by_distance[0]; }
};

/// Throws InvalidArgument when px lies outside the image rectangle.
NearSquare get_near(PixelCoord px, const Camera& camera);

/// Oriented 3D box. Box frame: x along the length, y down along the height,
/// z along the width. World rotation = rotation_y(yaw) * pitch * roll, where
/// pitch turns the box's +x (front) upward about its width axis and roll
/// turns it about its length axis.
struct OrientedBox3D {
  Vec3 center = Vec3::Zero();
  double h = 1.0;
  double w = 1.0;
  double l = 1.0;
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;

  Mat3 rotation() const;
  Vec3 to_local(const Vec3& world) const;
  Vec3 to_world(const Vec3& local) const;
  /// Centre of the bottom face (the KITTI location anchor).
  Vec3 bottom_center() const;
  std::array<Vec3, 8> corners() const;
  OrientedBox3D inflated(double margin) const;
  /// Same box with pitch and roll dropped.
  OrientedBox3D yaw_only() const;
};

Mat3 box_rotation(double yaw, double pitch, double roll);

/// Builds a box from its bottom-centre anchor.
OrientedBox3D box_from_bottom_center(const Vec3& bottom_center, double h, double w, double l,
                                     double yaw, double pitch = 0.0, double roll = 0.0);

/// Inclusive containment test in the box frame, with tolerance `tol` metres.
bool point_in_oriented_box(const Vec3& p, const OrientedBox3D& box, double tol = 1e-9);

}  // namespace lidarsynth
