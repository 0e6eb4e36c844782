#include <gtest/gtest.h>

#include <random>

#include "lidarsynth/error.hpp"
#include "lidarsynth/geometry.hpp"
#include "oracles.hpp"

using namespace lidarsynth;

namespace {

const Vec3 kK(0, 0, 1);

Camera small_camera() { return Camera(1.0, 64, 48, 0.15, 600.0); }

}  // namespace

TEST(Rotation, ExamplesFollowSignConvention) {
  EXPECT_TRUE((rotation_y(0) * kK).isApprox(kK));
  EXPECT_NEAR((rotation_y(kPi / 2) * kK - Vec3(1, 0, 0)).norm(), 0.0, 1e-15);
  EXPECT_NEAR((rotation_x(kPi / 2) * kK - Vec3(0, -1, 0)).norm(), 0.0, 1e-15);
}

TEST(Rotation, PropertyOrthonormalWithUnitDeterminant) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ang(-10.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    for (const Mat3& r : {rotation_x(ang(rng)), rotation_y(ang(rng)), rotation_z(ang(rng)),
                          box_rotation(ang(rng), ang(rng), ang(rng))}) {
      EXPECT_LT((r.transpose() * r - Mat3::Identity()).norm(), 1e-12);
      EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
    }
  }
}

TEST(MakeRay, Examples) {
  EXPECT_LT((make_ray(0, 0) - kK).norm(), 1e-15);
  const double two = 2.0 * kPi / 180.0;
  EXPECT_LT((make_ray(0, two) - Vec3(0, -std::sin(two), std::cos(two))).norm(), 1e-15);
  EXPECT_LT((make_ray(kPi / 4, 0) - Vec3(std::sqrt(0.5), 0, std::sqrt(0.5))).norm(), 1e-15);
}

TEST(MakeRay, PropertyUnitNormAndComposition) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int i = 0; i < 1000; ++i) {
    const double t = ang(rng), p = ang(rng);
    const Vec3 r = make_ray(t, p);
    EXPECT_NEAR(r.norm(), 1.0, 1e-12);
    EXPECT_LT((r - rotation_y(t) * rotation_x(p) * kK).norm(), 1e-12);
  }
}

TEST(Camera, RejectsInvalidParameters) {
  EXPECT_THROW(Camera(0.0, 10, 10, 0.1, 10), InvalidArgument);
  EXPECT_THROW(Camera(kPi, 10, 10, 0.1, 10), InvalidArgument);
  EXPECT_THROW(Camera(1.0, 1, 10, 0.1, 10), InvalidArgument);
  EXPECT_THROW(Camera(1.0, 10, 10, 0.0, 10), InvalidArgument);
  EXPECT_THROW(Camera(1.0, 10, 10, 1.0, 1.0), InvalidArgument);
}

TEST(Camera, DatasetDefaultHasNinetyDegreeHorizontalFov) {
  const Camera c = Camera::dataset_default();
  EXPECT_EQ(c.width(), 1920);
  EXPECT_EQ(c.height(), 1080);
  const ClipPlaneDims d = clipping_plane_dims(c);
  EXPECT_NEAR(d.width / (2 * c.near_clip()), 1.0, 1e-12);  // tan(45 deg)
}

TEST(ClippingPlane, Examples) {
  const ClipPlaneDims a = clipping_plane_dims(Camera(kPi / 2, 100, 100, 1.0, 10.0));
  EXPECT_NEAR(a.width, 2.0, 1e-12);
  EXPECT_NEAR(a.height, 2.0, 1e-12);
  // nc_z = 0.15, fov = 1 rad, AR = 16/9; 2 * 0.15 * tan(0.5) evaluated by hand.
  const ClipPlaneDims b = clipping_plane_dims(Camera(1.0, 1600, 900, 0.15, 600.0));
  EXPECT_NEAR(b.height, 0.163890746953, 1e-11);
  EXPECT_NEAR(b.width, 0.291361327917, 1e-11);
}

TEST(ClippingPlane, DoublingAspectDoublesWidth) {
  const ClipPlaneDims a = clipping_plane_dims(Camera(1.0, 200, 100, 0.2, 50.0));
  const ClipPlaneDims b = clipping_plane_dims(Camera(1.0, 400, 100, 0.2, 50.0));
  EXPECT_NEAR(b.width, 2 * a.width, 1e-15);
  EXPECT_DOUBLE_EQ(b.height, a.height);
}

TEST(Project, OpticalAxisAndFrustumEdge) {
  const Camera c = small_camera();
  const PixelCoord p = project(kK, c);
  EXPECT_DOUBLE_EQ(p.u, 31.5);
  EXPECT_DOUBLE_EQ(p.v, 23.5);
  const ClipPlaneDims d = clipping_plane_dims(c);
  const PixelCoord e = project(Vec3(d.width / (2 * c.near_clip()), 0, 1), c);
  EXPECT_NEAR(e.u, 63.0, 1e-9);
  EXPECT_THROW(project(Vec3(0, 0, 0), c), InvalidArgument);
  EXPECT_THROW(project(Vec3(0, 0, -1), c), InvalidArgument);
}

TEST(Project, AgreesWithExplicitPinhole) {
  const Camera c = Camera::dataset_default();
  const oracle::Pinhole ph{1920, 1080, c.fov_v(), 0.15, 600.0};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> xy(-1.5, 1.5);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 d(xy(rng), xy(rng), 1.0);
    const auto [u, v] = ph.project(d);
    const PixelCoord p = project(d, c);
    EXPECT_NEAR(p.u, u, 1e-9);
    EXPECT_NEAR(p.v, v, 1e-9);
  }
}

TEST(Project, PropertyMonotoneInThetaAndPhi) {
  const Camera c = Camera::dataset_default();
  for (double phi = -0.4; phi <= 0.05; phi += 0.05) {
    double last = -1e9;
    for (double theta = -0.7; theta <= 0.7; theta += 0.01) {
      const double u = project(make_ray(theta, phi), c).u;
      EXPECT_GT(u, last);
      last = u;
    }
  }
  for (double theta = -0.7; theta <= 0.7; theta += 0.1) {
    double last = -1e9;
    for (double phi = 0.4; phi >= -0.4; phi -= 0.01) {  // decreasing phi moves down
      const double v = project(make_ray(theta, phi), c).v;
      EXPECT_GT(v, last);
      last = v;
    }
  }
}

TEST(Unproject, Examples) {
  const Camera c = small_camera();
  EXPECT_LT((unproject({31.5, 23.5}, 10.0, c) - Vec3(0, 0, 10)).norm(), 1e-12);
  const Vec3 edge = unproject({63.0, 23.5}, 7.0, c);
  const ClipPlaneDims d = clipping_plane_dims(c);
  EXPECT_NEAR(edge.x() / edge.z(), d.width / (2 * c.near_clip()), 1e-12);
  EXPECT_NEAR(edge.norm(), 7.0, 1e-12);
  EXPECT_THROW(unproject({1, 1}, 0.0, c), InvalidArgument);
  EXPECT_THROW(unproject({1, 1}, -2.0, c), InvalidArgument);
}

TEST(Unproject, PropertyInverseOfProject) {
  const Camera c = Camera::dataset_default();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1919), v(0, 1079), r(0.2, 500);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const PixelCoord px{u(rng), v(rng)};
    const PixelCoord back = project(unproject(px, r(rng), c), c);
    worst = std::max({worst, std::abs(back.u - px.u), std::abs(back.v - px.v)});
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Unproject, RoundTripIsCollinear) {
  const Camera c = Camera::dataset_default();
  const Vec3 d = Vec3(0.3, -0.2, 1.0).normalized();
  const Vec3 p = unproject(project(d, c), 12.5, c);
  EXPECT_LT(p.normalized().cross(d).norm(), 1e-12);
}

TEST(GetNear, IntegralCoordinate) {
  const Camera c = small_camera();
  const NearSquare s = get_near({10.0, 10.0}, c);
  EXPECT_EQ(s.nearest(), (Pixel{10, 10}));
  // All four distinct and in-image.
  for (int i = 0; i < 4; ++i) {
    EXPECT_TRUE(c.in_image(s.by_distance[i]));
    for (int j = 0; j < i; ++j) EXPECT_FALSE(s.by_distance[i] == s.by_distance[j]);
  }
}

TEST(GetNear, Examples) {
  const Camera c = small_camera();
  const NearSquare a = get_near({10.2, 10.2}, c);
  EXPECT_EQ(a.by_distance[0], (Pixel{10, 10}));
  EXPECT_EQ(a.by_distance[1], (Pixel{11, 10}));  // tie: smaller v first
  EXPECT_EQ(a.by_distance[2], (Pixel{10, 11}));
  EXPECT_EQ(a.by_distance[3], (Pixel{11, 11}));
  EXPECT_EQ(get_near({10.9, 10.1}, c).nearest(), (Pixel{11, 10}));
}

TEST(GetNear, EdgesAndOutside) {
  const Camera c = small_camera();
  const NearSquare s = get_near({63.0, 47.0}, c);
  EXPECT_EQ(s.nearest(), (Pixel{63, 47}));
  EXPECT_EQ(s.base, (Pixel{62, 46}));
  EXPECT_DOUBLE_EQ(s.frac_u, 1.0);
  EXPECT_THROW(get_near({-0.01, 3}, c), InvalidArgument);
  EXPECT_THROW(get_near({3, 47.01}, c), InvalidArgument);
}

TEST(GetNear, PropertySortedByDistanceWithTieRule) {
  const Camera c = small_camera();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 63), v(0, 47);
  for (int i = 0; i < 2000; ++i) {
    const PixelCoord px{std::round(u(rng) * 4) / 4, std::round(v(rng) * 4) / 4};
    const NearSquare s = get_near(px, c);
    auto key = [&](Pixel p) {
      return std::tuple(std::pow(p.u - px.u, 2) + std::pow(p.v - px.v, 2), p.v, p.u);
    };
    for (int k = 1; k < 4; ++k) EXPECT_LE(key(s.by_distance[k - 1]), key(s.by_distance[k]));
    // The square contains px.
    EXPECT_LE(s.base.u, px.u);
    EXPECT_GE(s.base.u + 1, px.u);
    EXPECT_NEAR(s.base.u + s.frac_u, px.u, 1e-12);
    EXPECT_NEAR(s.base.v + s.frac_v, px.v, 1e-12);
  }
}

TEST(OrientedBox, ContainmentExamples) {
  OrientedBox3D box;  // unit cube at the origin
  EXPECT_TRUE(point_in_oriented_box(Vec3(0, 0, 0), box));
  EXPECT_TRUE(point_in_oriented_box(Vec3(0.49, 0, 0), box));
  EXPECT_FALSE(point_in_oriented_box(Vec3(0.51, 0, 0), box));

  OrientedBox3D b{Vec3(2, 1, 15), 1.5, 1.8, 4.5, 0.7, 0.1, -0.05};
  for (const Vec3& corner : b.corners()) {
    EXPECT_TRUE(point_in_oriented_box(corner, b));
    const Vec3 out = corner + 0.001 * b.rotation().col(0) *
                                  (b.to_local(corner).x() > 0 ? 1.0 : -1.0);
    EXPECT_FALSE(point_in_oriented_box(out, b));
  }
}

TEST(OrientedBox, BottomCenterAnchor) {
  const OrientedBox3D b = box_from_bottom_center(Vec3(1, 1.73, 20), 1.5, 1.8, 4.5, 0.3);
  EXPECT_LT((b.bottom_center() - Vec3(1, 1.73, 20)).norm(), 1e-12);
  EXPECT_NEAR(b.center.y(), 1.73 - 0.75, 1e-12);
}

TEST(OrientedBox, PitchLiftsTheFront) {
  OrientedBox3D b;
  b.l = 4.0;
  b.pitch = 0.2;
  const Vec3 front = b.to_world(Vec3(2, 0, 0));
  EXPECT_LT(front.y(), 0.0);  // y is down
}

TEST(OrientedBox, PropertyAgreesWithExplicitInversePose) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> pos(-20, 20), dim(0.2, 5), ang(-kPi, kPi),
      small(-0.4, 0.4);
  for (int i = 0; i < 10000; ++i) {
    OrientedBox3D b{Vec3(pos(rng), pos(rng) / 10, 30 + pos(rng)), dim(rng), dim(rng), dim(rng),
                    ang(rng), small(rng), small(rng)};
    const Vec3 p = b.center + Vec3(pos(rng), pos(rng), pos(rng)) / 6.0;
    // Explicit inverse: undo roll, pitch, yaw one at a time.
    Vec3 q = rotation_y(-b.yaw) * (p - b.center);
    q = rotation_z(b.pitch) * q;
    q = rotation_x(-b.roll) * q;
    const bool brute = std::abs(q.x()) <= b.l / 2 + 1e-9 && std::abs(q.y()) <= b.h / 2 + 1e-9 &&
                       std::abs(q.z()) <= b.w / 2 + 1e-9;
    EXPECT_EQ(point_in_oriented_box(p, b), brute);
  }
}

TEST(WrapAngle, StaysInRange) {
  for (double a = -20; a <= 20; a += 0.37) {
    const double w = wrap_angle(a);
    EXPECT_LE(std::abs(w), kPi);
    EXPECT_NEAR(std::remainder(w - a, 2 * kPi), 0.0, 1e-12);
  }
}
