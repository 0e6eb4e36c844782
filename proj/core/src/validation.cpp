#include "lidarsynth/validation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "lidarsynth/render.hpp"

namespace lidarsynth {

std::string_view to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::Pass: return "PASS";
    case CheckStatus::Fail: return "FAIL";
    case CheckStatus::Skip: return "SKIP";
  }
  return "?";
}

namespace {

Vec3 ray_of(const ScanPattern& pattern, const LidarPoint& p) {
  const ScanAngle& a = pattern.rays.at(p.ray);
  return make_ray(a.theta, a.phi);
}

double range_of(const LidarPoint& p) { return p.position.cast<double>().norm(); }

std::string percent(double x) {
  std::ostringstream ss;
  ss.precision(4);
  ss << 100.0 * x << "%";
  return ss.str();
}

}  // namespace

OracleStats oracle_stats(const Scene& scene, const Camera& camera, LidarConfig lidar,
                         int workers) {
  lidar.noise_sigma = 0.0;
  const RenderedFrame frame = render(scene, camera, workers);
  const PointCloud cloud = generate_point_cloud(frame.depth, frame.instance, camera, lidar, workers);
  const ScanPattern pattern = build_scan_pattern(lidar);

  // Surface identity of a pixel: primitive plus its smooth face.
  constexpr std::uint64_t kMiss = ~std::uint64_t{0};
  std::unordered_map<long long, std::uint64_t> surface_cache;
  auto pixel_surface = [&](Pixel px) -> std::uint64_t {
    const long long key = static_cast<long long>(px.v) * camera.width() + px.u;
    if (auto it = surface_cache.find(key); it != surface_cache.end()) return it->second;
    const auto hit = raycast_exact(scene, pixel_direction({double(px.u), double(px.v)}, camera));
    const std::uint64_t s = hit ? (std::uint64_t{hit->surface} << 32 | hit->part) : kMiss;
    surface_cache.emplace(key, s);
    return s;
  };

  OracleStats s;
  for (const LidarPoint& p : cloud.points) {
    const Vec3 dir = ray_of(pattern, p);
    const auto oracle = raycast_exact(scene, dir);
    ++s.points;
    double rel = std::numeric_limits<double>::infinity();
    if (oracle) rel = std::abs(range_of(p) - oracle->range) / oracle->range;
    if (rel < 0.01) ++s.within_1pct;
    if (rel > 0.02) ++s.over_2pct;
    s.max_rel_error = std::max(s.max_rel_error, rel);

    const NearSquare sq = get_near(project(dir, camera), camera);
    const std::uint64_t first = pixel_surface(sq.by_distance[0]);
    bool same = first != kMiss;
    for (int k = 1; k < 4 && same; ++k) same = pixel_surface(sq.by_distance[k]) == first;
    if (same) {
      ++s.same_surface;
      if (rel >= 0.001) ++s.same_surface_over_0_1pct;
      s.max_same_surface_rel_error = std::max(s.max_same_surface_rel_error, rel);
    }
  }
  return s;
}

GateStats gate_stats(double near_z, double ratio, const Camera& camera, LidarConfig lidar,
                     int workers) {
  lidar.noise_sigma = 0.0;
  const Scene scene = make_two_plane_step_scene(near_z, ratio);
  const RenderedFrame frame = render(scene, camera, workers);
  const PointCloud cloud = generate_point_cloud(frame.depth, frame.instance, camera, lidar, workers);
  const ScanPattern pattern = build_scan_pattern(lidar);
  const double far_z = near_z * ratio;

  GateStats s;
  for (const LidarPoint& p : cloud.points) {
    const Vec3 dir = ray_of(pattern, p);
    const NearSquare sq = get_near(project(dir, camera), camera);
    double lo = near_z / dir.z();
    double hi = far_z / dir.z();
    for (const Pixel& px : sq.by_distance) {
      const Vec3 d = pixel_direction({double(px.u), double(px.v)}, camera);
      lo = std::max(lo, near_z / d.z());
      hi = std::min(hi, far_z / d.z());
    }
    const double r = range_of(p);
    ++s.points;
    if (r > lo + 1e-3 && r < hi - 1e-3) ++s.floating;
  }
  return s;
}

NoiseStats noise_stats(std::size_t count, double sigma, std::uint64_t seed,
                       double tail_threshold) {
  PointCloud clean;
  clean.points.resize(count);
  std::vector<double> ranges(count);
  for (std::size_t i = 0; i < count; ++i) {
    // Deterministic spread of directions and ranges inside the default fan.
    const double theta = deg_to_rad(-44.0 + 88.0 * double(i % 977) / 977.0);
    const double phi = deg_to_rad(-24.0 + 25.0 * double(i % 61) / 61.0);
    const double r = 5.0 + 45.0 * double(i % 101) / 101.0;
    clean.points[i].position = (make_ray(theta, phi) * r).cast<float>();
    ranges[i] = clean.points[i].position.cast<double>().norm();
  }
  const PointCloud noisy = add_noise(clean, sigma, seed);
  NoiseStats s;
  s.points = count;
  s.tail_threshold = tail_threshold;
  if (count == 0) return s;
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t big = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double d = noisy.points[i].position.cast<double>().norm() - ranges[i];
    sum += d;
    sum_sq += d * d;
    if (std::abs(d) >= tail_threshold) ++big;
  }
  s.mean = sum / double(count);
  s.stddev = std::sqrt(std::max(0.0, sum_sq / double(count) - s.mean * s.mean));
  s.tail_fraction = double(big) / double(count);
  return s;
}

double fraction_inside(const PointCloud& cloud, EntityId entity, const OrientedBox3D& box,
                       double margin) {
  const OrientedBox3D grown = box.inflated(margin);
  std::size_t total = 0;
  std::size_t inside = 0;
  for (const LidarPoint& p : cloud.points) {
    if (p.label != entity) continue;
    ++total;
    if (point_in_oriented_box(p.position.cast<double>(), grown)) ++inside;
  }
  return total == 0 ? 0.0 : double(inside) / double(total);
}

ConsistencyStats consistency_stats(int frames, std::uint64_t seed, const Camera& camera,
                                   LidarConfig lidar, int workers) {
  lidar.noise_sigma = 0.0;
  FrameOptions opts;
  opts.lidar = lidar;
  opts.workers = workers;
  opts.color = false;
  ConsistencyStats s;
  for (int f = 0; f < frames; ++f) {
    const Scene scene = make_random_scene(seed + static_cast<std::uint64_t>(f));
    const ProcessedFrame frame = process_frame(scene, camera, opts);
    const FrameArtifacts& a = frame.artifacts;
    ++s.frames;
    for (const LidarPoint& p : a.cloud.points) {
      if (!is_entity_code(p.label)) continue;
      ++s.entity_points;
      const Entity* e = scene.find(p.label);
      if (e && point_in_oriented_box(p.position.cast<double>(), e->box.inflated(0.02))) {
        ++s.inside_box;
      }
    }
    for (const ExtendedLabel& ext : a.labels.extended) {
      ++s.labels;
      const auto n = static_cast<std::size_t>(
          std::count(a.instance.values().begin(), a.instance.values().end(), ext.entity_id));
      if (n != ext.pixel_count) ++s.pixel_count_mismatches;
    }
  }
  return s;
}

std::vector<CheckResult> run_validation(const ValidationConfig& config) {
  std::vector<CheckResult> out;
  const Camera& cam = config.camera;

  {
    CheckResult r{"oracle-equivalence", CheckStatus::Pass, "", {}};
    std::ostringstream detail;
    for (const std::string name : {"wall", "sphere", "slope"}) {
      const OracleStats s = oracle_stats(make_builtin_scene(name), cam, config.lidar, config.workers);
      const double within = s.points ? double(s.within_1pct) / double(s.points) : 0.0;
      const double over = s.points ? double(s.over_2pct) / double(s.points) : 1.0;
      r.metrics[name + ".points"] = double(s.points);
      r.metrics[name + ".within_1pct"] = within;
      r.metrics[name + ".over_2pct"] = over;
      if (within < 0.99 || over > 0.001) r.status = CheckStatus::Fail;
      if (detail.tellp() > 0) detail << "; ";
      detail << name << ": " << s.points << " points, " << percent(within) << " within 1%, "
             << percent(over) << " over 2%";
    }
    r.detail = detail.str();
    out.push_back(std::move(r));
  }

  {
    const GateStats g = gate_stats(20.0, 1.2, cam, config.lidar, config.workers);
    CheckResult r{"gate", g.floating == 0 ? CheckStatus::Pass : CheckStatus::Fail, "", {}};
    r.metrics["points"] = double(g.points);
    r.metrics["floating"] = double(g.floating);
    std::ostringstream d;
    d << g.floating << " of " << g.points << " points float between the step surfaces (gate ratio "
      << config.lidar.gate_ratio << ")";
    r.detail = d.str();
    out.push_back(std::move(r));
  }

  {
    const Scene scene = make_street_basic_scene();
    const RenderedFrame frame = render(scene, cam, config.workers);
    const PointCloud cloud =
        generate_point_cloud(frame.depth, frame.instance, cam, config.lidar, config.workers);
    const double tol = 1e-4;  // degrees, float storage
    std::size_t bad = 0;
    for (const LidarPoint& p : cloud.points) {
      const Vec3 q = p.position.cast<double>();
      const double theta = rad_to_deg(std::atan2(q.x(), q.z()));
      const double phi = rad_to_deg(std::atan2(-q.y(), std::hypot(q.x(), q.z())));
      if (!(theta > config.lidar.theta_min - tol && theta < config.lidar.theta_max + tol &&
            phi >= config.lidar.phi_min - tol && phi <= config.lidar.phi_max + tol)) {
        ++bad;
      }
    }
    CheckResult r{"fov", bad == 0 ? CheckStatus::Pass : CheckStatus::Fail, "", {}};
    r.metrics["points"] = double(cloud.size());
    r.metrics["outside"] = double(bad);
    r.detail = std::to_string(bad) + " of " + std::to_string(cloud.size()) +
               " street-basic points outside the scan limits";
    out.push_back(std::move(r));
  }

  {
    CheckResult r{"noise-statistics", CheckStatus::Skip, "noise disabled", {}};
    const double sigma = config.lidar.noise_sigma;
    if (sigma > 0.0) {
      // 2 cm at the default 6 mm; the same multiple of sigma otherwise.
      const NoiseStats n = noise_stats(100000, sigma, config.lidar.seed, sigma * (0.02 / 0.006));
      const bool std_ok = std::abs(n.stddev - sigma) <= 0.05 * sigma;
      const bool tail_ok = n.tail_fraction <= 0.002;
      r.status = std_ok && tail_ok ? CheckStatus::Pass : CheckStatus::Fail;
      r.metrics["stddev"] = n.stddev;
      r.metrics["tail_fraction"] = n.tail_fraction;
      std::ostringstream d;
      d << "std " << n.stddev * 1000.0 << " mm (target " << sigma * 1000.0 << " mm), "
        << percent(n.tail_fraction) << " displaced >= " << n.tail_threshold * 1000.0 << " mm";
      r.detail = d.str();
    }
    out.push_back(std::move(r));
  }

  {
    const ConsistencyStats c = consistency_stats(config.consistency_frames, config.seed, cam,
                                                 config.lidar, config.workers);
    const double frac = c.entity_points ? double(c.inside_box) / double(c.entity_points) : 1.0;
    const bool ok = frac >= 0.99 && c.pixel_count_mismatches == 0;
    CheckResult r{"point-label-consistency", ok ? CheckStatus::Pass : CheckStatus::Fail, "", {}};
    r.metrics["frames"] = double(c.frames);
    r.metrics["entity_points"] = double(c.entity_points);
    r.metrics["inside_fraction"] = frac;
    r.metrics["pixel_count_mismatches"] = double(c.pixel_count_mismatches);
    r.detail = std::to_string(c.frames) + " frames, " + percent(frac) +
               " of entity points inside their box, " +
               std::to_string(c.pixel_count_mismatches) + " pixel-count mismatches";
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace lidarsynth
