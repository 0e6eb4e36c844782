#include "lidarsynth/lidar.hpp"

#include <cmath>
#include <random>

#include "lidarsynth/error.hpp"
#include "lidarsynth/parallel.hpp"

namespace lidarsynth {

namespace {

// Integer multiples k*res inside [lo, hi], optionally excluding the ends.
// A small tolerance absorbs representation error at exact multiples (-45/0.09).
std::vector<int> multiples(double res, double lo, double hi, bool exclusive) {
  const double tol = 1e-9;
  int k_lo = static_cast<int>(std::ceil(lo / res - tol));
  int k_hi = static_cast<int>(std::floor(hi / res + tol));
  if (exclusive) {
    if (std::abs(k_lo * res - lo) <= tol * std::max(1.0, std::abs(lo))) ++k_lo;
    if (std::abs(k_hi * res - hi) <= tol * std::max(1.0, std::abs(hi))) --k_hi;
  }
  std::vector<int> ks;
  for (int k = k_lo; k <= k_hi; ++k) ks.push_back(k);
  return ks;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

bool projects_into_image(const Vec3& dir, const Camera& camera, PixelCoord& px) {
  if (dir.z() <= 0.0) return false;
  px = project(dir, camera);
  return camera.in_image(px);
}

template <typename Sample>
PointCloud scan(const ScanPattern& pattern, int workers, Sample&& sample) {
  const std::size_t n = pattern.rays.size();
  std::vector<LidarPoint> slots(n);
  std::vector<char> hit(n, 0);
  parallel_for_chunks(n, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const ScanAngle& a = pattern.rays[i];
      if (auto p = sample(make_ray(a.theta, a.phi))) {
        slots[i] = *p;
        slots[i].ray = static_cast<std::uint32_t>(i);
        hit[i] = 1;
      }
    }
  });
  PointCloud cloud;
  for (std::size_t i = 0; i < n; ++i) {
    if (hit[i]) cloud.points.push_back(slots[i]);
  }
  return cloud;
}

}  // namespace

void LidarConfig::validate() const {
  if (!(theta_res > 0.0) || !(phi_res > 0.0)) {
    throw InvalidArgument("angular resolutions must be positive");
  }
  if (!(theta_min < theta_max) || !(phi_min <= phi_max)) {
    throw InvalidArgument("scan limits are inverted");
  }
  if (!(max_range > 0.0)) throw InvalidArgument("max_range must be positive");
  if (!(gate_ratio >= 1.0)) throw InvalidArgument("gate_ratio must be at least 1");
  if (!(noise_sigma >= 0.0)) throw InvalidArgument("noise_sigma must be non-negative");
}

ScanPattern build_scan_pattern(const LidarConfig& config) {
  config.validate();
  const auto kt = multiples(config.theta_res, config.theta_min, config.theta_max, true);
  const auto kp = multiples(config.phi_res, config.phi_min, config.phi_max, false);
  if (kt.empty() || kp.empty()) throw InvalidArgument("scan pattern is empty");
  ScanPattern pattern;
  for (int k : kt) pattern.thetas.push_back(deg_to_rad(k * config.theta_res));
  for (int k : kp) pattern.phis.push_back(deg_to_rad(k * config.phi_res));
  pattern.rays.reserve(kt.size() * kp.size());
  for (std::size_t i = 0; i < kt.size(); ++i) {
    for (std::size_t j = 0; j < kp.size(); ++j) {
      pattern.rays.push_back({kt[i], kp[j], pattern.thetas[i], pattern.phis[j]});
    }
  }
  return pattern;
}

PointCloud generate_point_cloud(const DepthBuffer& buffer, const SegmentationImage& seg,
                                const Camera& camera, const LidarConfig& config, int workers) {
  if (!buffer.same_shape(camera.width(), camera.height()) ||
      !seg.same_shape(camera.width(), camera.height())) {
    throw InvalidArgument("depth buffer, segmentation image and camera dimensions differ");
  }
  const ScanPattern pattern = build_scan_pattern(config);
  PointCloud cloud = scan(pattern, workers, [&](const Vec3& dir) -> std::optional<LidarPoint> {
    PixelCoord px;
    if (!projects_into_image(dir, camera, px)) return std::nullopt;
    const DepthSample s = gated_sample(px, buffer, seg, camera, config.gate_ratio);
    if (!(s.range < config.max_range)) return std::nullopt;
    LidarPoint p;
    p.position = (dir * s.range).cast<float>();
    p.label = s.label;
    return p;
  });
  if (config.noise_sigma > 0.0) cloud = add_noise(std::move(cloud), config.noise_sigma, config.seed);
  return cloud;
}

PointCloud add_noise(PointCloud cloud, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw InvalidArgument("noise sigma must be non-negative");
  if (sigma == 0.0) return cloud;
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    LidarPoint& p = cloud.points[i];
    const Vec3 pos = p.position.cast<double>();
    const double r = pos.norm();
    if (r == 0.0) continue;
    std::mt19937_64 engine(splitmix64(seed ^ splitmix64(i)));
    std::normal_distribution<double> normal(0.0, sigma);
    const double delta = normal(engine);
    p.position = (pos * ((r + delta) / r)).cast<float>();
  }
  return cloud;
}

PointCloud raycast_point_cloud(const Scene& scene, const Camera& camera,
                               const LidarConfig& config, const RaycastOptions& options,
                               int workers) {
  const ScanPattern pattern = build_scan_pattern(config);
  return scan(pattern, workers, [&](const Vec3& dir) -> std::optional<LidarPoint> {
    PixelCoord px;
    if (!projects_into_image(dir, camera, px)) return std::nullopt;
    const auto hit = raycast(scene, dir, options);
    if (!hit || !(hit->range < config.max_range)) return std::nullopt;
    LidarPoint p;
    p.position = (dir * hit->range).cast<float>();
    p.label = hit->label;
    return p;
  });
}

}  // namespace lidarsynth
