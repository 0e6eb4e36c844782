#pragma once

// Depth-buffer LiDAR synthesis: scan pattern, gated sampling per ray, noise.

#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "lidarsynth/depth_buffer.hpp"
#include "lidarsynth/geometry.hpp"
#include "lidarsynth/scene.hpp"

namespace lidarsynth {

/// Scanner parameters. Angles are in degrees.
struct LidarConfig {
  double theta_res = 0.09;
  double phi_res = 0.42;
  double theta_min = -45.0;  // exclusive
  double theta_max = 45.0;   // exclusive
  double phi_min = -24.9;    // inclusive
  double phi_max = 2.0;      // inclusive
  double max_range = 120.0;  // metres, points at or beyond are dropped
  double gate_ratio = kDefaultGateRatio;
  double noise_sigma = 0.006;  // metres, radial
  std::uint64_t seed = 0;

  /// Throws InvalidArgument on non-positive resolutions, inverted bounds,
  /// max_range <= 0, gate_ratio < 1 or negative noise.
  void validate() const;
};

struct ScanAngle {
  int k_theta = 0;  // theta = k_theta * theta_res
  int k_phi = 0;    // phi = k_phi * phi_res
  double theta = 0.0;  // radians
  double phi = 0.0;    // radians
};

struct ScanPattern {
  std::vector<double> thetas;  // radians, ascending
  std::vector<double> phis;    // radians, ascending
  /// theta-major, then phi.
  std::vector<ScanAngle> rays;
};

/// theta: integer multiples of theta_res strictly inside (theta_min, theta_max).
/// phi: integer multiples of phi_res inside [phi_min, phi_max].
/// Throws InvalidArgument when either set is empty.
ScanPattern build_scan_pattern(const LidarConfig& config);

inline constexpr std::uint32_t kNoRay = std::numeric_limits<std::uint32_t>::max();

struct LidarPoint {
  Eigen::Vector3f position = Eigen::Vector3f::Zero();  // camera frame, metres
  std::uint32_t label = 0;   // entity ID or stencil code
  std::uint32_t ray = kNoRay;  // index into ScanPattern::rays; not serialized
};

struct PointCloud {
  std::vector<LidarPoint> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Runs the scan over a rendered depth buffer. Rays that project outside the
/// image rectangle are skipped. Noise is applied when noise_sigma > 0.
/// Throws InvalidArgument when the buffer, segmentation and camera disagree
/// on dimensions.
PointCloud generate_point_cloud(const DepthBuffer& buffer, const SegmentationImage& seg,
                                const Camera& camera, const LidarConfig& config,
                                int workers = 0);

/// Displaces each point along its own direction by N(0, sigma^2). The sample
/// for point i depends only on (seed, i).
PointCloud add_noise(PointCloud cloud, double sigma, std::uint64_t seed);

/// Ray-casting baseline over the same scan pattern and image footprint as
/// generate_point_cloud. No noise.
PointCloud raycast_point_cloud(const Scene& scene, const Camera& camera,
                               const LidarConfig& config, const RaycastOptions& options,
                               int workers = 0);

}  // namespace lidarsynth
