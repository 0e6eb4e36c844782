#pragma once

// Self-checks run by `lidarsynth validate`.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lidarsynth/lidar.hpp"
#include "lidarsynth/pipeline.hpp"
#include "lidarsynth/scene.hpp"

namespace lidarsynth {

enum class CheckStatus { Pass, Fail, Skip };

std::string_view to_string(CheckStatus status);

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  std::string detail;
  std::map<std::string, double> metrics;
};

struct ValidationConfig {
  Camera camera = Camera::dataset_default();
  LidarConfig lidar;  // noise_sigma drives the noise check; other checks run noise-free
  int workers = 0;
  int consistency_frames = 4;
  std::uint64_t seed = 0;
};

// --- range error against the exact ray caster --------------------------------

struct OracleStats {
  std::size_t points = 0;
  std::size_t within_1pct = 0;
  std::size_t over_2pct = 0;
  std::size_t same_surface = 0;           // points whose 4 neighbour pixels hit one smooth face
  std::size_t same_surface_over_0_1pct = 0;
  double max_rel_error = 0.0;
  double max_same_surface_rel_error = 0.0;
};

/// Noise-free scan of `scene` compared ray by ray with raycast_exact.
OracleStats oracle_stats(const Scene& scene, const Camera& camera, LidarConfig lidar,
                         int workers = 0);

// --- gate --------------------------------------------------------------------

struct GateStats {
  std::size_t points = 0;
  std::size_t floating = 0;  // strictly between the two surfaces, 1 mm margin
};

/// Scans a two-plane-step scene (near surface at near_z over x < 0, far plane
/// at near_z * ratio) and counts points floating between the surfaces. The
/// band for a point runs from the farthest near-surface range to the nearest
/// far-surface range over its own ray and its four neighbour pixel rays.
GateStats gate_stats(double near_z, double ratio, const Camera& camera, LidarConfig lidar,
                     int workers = 0);

// --- noise -------------------------------------------------------------------

struct NoiseStats {
  std::size_t points = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double tail_threshold = 0.02;  // metres
  double tail_fraction = 0.0;    // |displacement| >= tail_threshold
};

/// Applies add_noise to `count` synthetic points and measures the radial
/// displacements.
NoiseStats noise_stats(std::size_t count, double sigma, std::uint64_t seed,
                       double tail_threshold = 0.02);

// --- labels ------------------------------------------------------------------

struct ConsistencyStats {
  std::size_t frames = 0;
  std::size_t entity_points = 0;
  std::size_t inside_box = 0;          // inside the full-pose box inflated by 2 cm
  std::size_t labels = 0;
  std::size_t pixel_count_mismatches = 0;
};

/// Runs the full frame pipeline noise-free on `frames` random scenes.
ConsistencyStats consistency_stats(int frames, std::uint64_t seed, const Camera& camera,
                                   LidarConfig lidar, int workers = 0);

/// Fraction of `entity`'s points (by label) inside `box` inflated by `margin`.
double fraction_inside(const PointCloud& cloud, EntityId entity, const OrientedBox3D& box,
                       double margin);

/// All validation checks in a fixed order.
std::vector<CheckResult> run_validation(const ValidationConfig& config);

}  // namespace lidarsynth
