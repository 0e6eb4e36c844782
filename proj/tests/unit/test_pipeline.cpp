#include <gtest/gtest.h>

#include <set>

#include "lidarsynth/pipeline.hpp"
#include "lidarsynth/validation.hpp"
#include "oracles.hpp"

using namespace lidarsynth;

namespace {

Camera cam() { return Camera::from_horizontal_fov(kPi / 2, 640, 360, 0.15, 600.0); }

std::size_t count(const SegmentationImage& img, std::uint32_t code) {
  return std::count(img.values().begin(), img.values().end(), code);
}

}  // namespace

TEST(Pipeline, ArtifactsAreMutuallyConsistent) {
  const Camera c = cam();
  const Scene s = make_street_basic_scene();
  FrameOptions o;
  o.lidar.noise_sigma = 0.0;
  const ProcessedFrame f = process_frame(s, c, o);
  const FrameArtifacts& a = f.artifacts;
  EXPECT_TRUE(a.depth == f.rendered.depth);
  EXPECT_TRUE(a.stencil == f.rendered.stencil);
  EXPECT_TRUE(a.calib == make_calibration(c));
  ASSERT_TRUE(a.color.has_value());
  ASSERT_EQ(a.labels.labels.size(), a.labels.extended.size());
  ASSERT_FALSE(a.labels.labels.empty());
  for (const ExtendedLabel& x : a.labels.extended) {
    EXPECT_EQ(x.pixel_count, count(a.instance, x.entity_id));
  }
  // Point labels come from the reconstructed instance image.
  std::set<std::uint32_t> codes(a.instance.values().begin(), a.instance.values().end());
  std::size_t entity_points = 0;
  for (const LidarPoint& p : a.cloud.points) {
    ASSERT_TRUE(codes.count(p.label)) << p.label;
    entity_points += is_entity_code(p.label);
  }
  EXPECT_GT(entity_points, 100u);
  // Reconstruction agrees with the renderer's ground truth on almost every object pixel.
  std::size_t object = 0, agree = 0;
  for (std::size_t i = 0; i < a.instance.size(); ++i) {
    if (!is_entity_code(f.rendered.instance.values()[i])) continue;
    ++object;
    agree += a.instance.values()[i] == f.rendered.instance.values()[i];
  }
  EXPECT_GE(double(agree) / double(object), 0.99);
}

TEST(Pipeline, ColorIsOptionalAndOutputIsWorkerIndependent) {
  const Camera c = cam();
  const Scene s = make_random_scene(8);
  FrameOptions o;
  o.lidar.seed = 3;
  o.color = false;
  o.workers = 1;
  const ProcessedFrame a = process_frame(s, c, o);
  o.workers = 3;
  const ProcessedFrame b = process_frame(s, c, o);
  EXPECT_FALSE(a.artifacts.color.has_value());
  EXPECT_TRUE(a.artifacts.instance == b.artifacts.instance);
  ASSERT_EQ(a.artifacts.cloud.size(), b.artifacts.cloud.size());
  for (std::size_t i = 0; i < a.artifacts.cloud.size(); ++i) {
    ASSERT_EQ(a.artifacts.cloud.points[i].position, b.artifacts.cloud.points[i].position);
  }
}

TEST(Validation, GateSuppressesFloatingPointsAndNegativeControlShowsThem) {
  const Camera c = Camera::dataset_default();
  LidarConfig l;
  l.noise_sigma = 0.0;
  const GateStats ok = gate_stats(20.0, 1.2, c, l);
  EXPECT_GT(ok.points, 10000u);
  EXPECT_EQ(ok.floating, 0u);
  l.gate_ratio = 10.0;
  EXPECT_GT(gate_stats(20.0, 1.2, c, l).floating, 0u);
}

TEST(Validation, OracleStatsOnWall) {
  LidarConfig l;
  l.noise_sigma = 0.0;
  const OracleStats s = oracle_stats(make_wall_scene(20.0), Camera::dataset_default(), l);
  EXPECT_GT(s.points, 10000u);
  EXPECT_EQ(s.within_1pct, s.points);
  EXPECT_EQ(s.over_2pct, 0u);
  EXPECT_EQ(s.same_surface, s.points);
  EXPECT_LT(s.max_rel_error, 1e-5);
}

TEST(Validation, NoiseStats) {
  const NoiseStats n = noise_stats(100000, 0.006, 1);
  EXPECT_EQ(n.points, 100000u);
  EXPECT_NEAR(n.stddev, 0.006, 0.0003);
  EXPECT_LE(n.tail_fraction, 0.002);
  EXPECT_NEAR(n.mean, 0.0, 1e-4);
}

TEST(Validation, FractionInside) {
  PointCloud cloud;
  OrientedBox3D box;
  box.center = Vec3(0, 0, 10);
  for (int i = 0; i < 4; ++i) {
    LidarPoint p;
    p.label = 5;
    p.position = Eigen::Vector3f(0.f, 0.f, 10.f + 0.2f * i);  // last one at +0.6 m
    cloud.points.push_back(p);
  }
  LidarPoint other;
  other.label = 6;
  cloud.points.push_back(other);
  EXPECT_DOUBLE_EQ(fraction_inside(cloud, 5, box, 0.02), 0.75);
  EXPECT_DOUBLE_EQ(fraction_inside(cloud, 5, box, 0.2), 1.0);
}

TEST(Validation, ConsistencyOnOneSmallFrame) {
  LidarConfig l;
  const ConsistencyStats s = consistency_stats(1, 4, cam(), l);
  EXPECT_EQ(s.frames, 1u);
  EXPECT_GT(s.entity_points, 0u);
  EXPECT_GE(double(s.inside_box) / double(s.entity_points), 0.99);
  EXPECT_EQ(s.pixel_count_mismatches, 0u);
  EXPECT_GT(s.labels, 0u);
}
