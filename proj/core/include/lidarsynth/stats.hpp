#pragma once

// Dataset statistics and the depth-buffer vs ray-casting comparison.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lidarsynth/annotator.hpp"
#include "lidarsynth/lidar.hpp"
#include "lidarsynth/scene.hpp"

namespace lidarsynth {

struct ClassCount {
  std::size_t total = 0;
  std::size_t frames_with = 0;  // frames holding at least one instance

  /// Average per image containing the class; nullopt when total is 0.
  std::optional<double> apicc() const;
};

struct ClassStats {
  std::map<std::string, ClassCount> classes;  // DontCare excluded
  std::size_t frames = 0;
  std::vector<std::string> unreadable;  // label files that failed to parse
};

ClassStats class_stats(const std::vector<std::vector<ObjectLabel>>& frames);
/// Reads every label_2/*.txt under `dataset`; unreadable files are reported
/// and skipped. Throws FormatError when label_2 does not exist.
ClassStats class_stats(const std::filesystem::path& dataset);

struct BevHeatmap {
  double cell_size = 0.5;
  double x_min = -40.0;  // inclusive
  double x_max = 40.0;   // exclusive
  double z_min = 0.0;
  double z_max = 100.0;
  int cols = 0;  // along x
  int rows = 0;  // along z, row 0 nearest the sensor
  std::vector<std::uint32_t> counts;  // row-major

  std::uint32_t at(int col, int row) const { return counts[std::size_t(row) * cols + col]; }
  std::uint64_t total() const;
  /// Cell of a camera-frame (x, z) position, or nullopt outside the extent.
  std::optional<std::pair<int, int>> cell_of(double x, double z) const;
};

inline constexpr double kDefaultBevCell = 0.5;

/// Bins label locations (x, z) of the given class (all non-DontCare classes
/// when `cls` is empty). Throws InvalidArgument on a non-positive cell size.
BevHeatmap bev_heatmap(const std::vector<std::vector<ObjectLabel>>& frames,
                       const std::optional<std::string>& cls, double cell_size = kDefaultBevCell);
BevHeatmap bev_heatmap(const std::filesystem::path& dataset, const std::optional<std::string>& cls,
                       double cell_size = kDefaultBevCell);

/// 8-bit PGM scaled linearly to the busiest cell, far rows at the top.
void write_heatmap_pgm(const BevHeatmap& map, const std::filesystem::path& path);
/// One CSV row per grid row (row 0 first), comma-separated counts.
void write_heatmap_csv(const BevHeatmap& map, const std::filesystem::path& path);

/// Symmetric Chamfer distance: the mean of both directed mean nearest-neighbour
/// distances. Throws InvalidArgument when either set is empty.
double chamfer_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

struct CompareOptions {
  std::optional<double> entity_range_limit = kDefaultProxyRangeLimit;
  bool use_proxy = true;
  int workers = 0;
};

struct EntityComparison {
  EntityId id = 0;
  ObjectClass cls = ObjectClass::Car;
  std::string model;
  double distance = 0.0;  // range to the box centre
  std::size_t depth_points = 0;
  std::size_t raycast_points = 0;
  std::optional<double> chamfer;  // when both sets are non-empty
};

struct CompareReport {
  std::vector<EntityComparison> entities;  // ordered by ID
  /// Entities with depth-buffer points but no ray-cast points.
  std::vector<EntityId> missed;
  std::size_t depth_total = 0;
  std::size_t raycast_total = 0;
};

/// Noise-free depth-buffer scan (labels from the rendered instance image)
/// against ray casting over the same pattern.
CompareReport compare_backends(const Scene& scene, const Camera& camera, LidarConfig config,
                               const CompareOptions& options = {});

}  // namespace lidarsynth
