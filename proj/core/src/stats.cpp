#include "lidarsynth/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lidarsynth/error.hpp"
#include "lidarsynth/kitti_io.hpp"
#include "lidarsynth/render.hpp"

namespace lidarsynth {

namespace {

struct LoadedLabels {
  std::vector<std::vector<ObjectLabel>> frames;
  std::vector<std::string> unreadable;
};

LoadedLabels load_dataset_labels(const std::filesystem::path& dataset) {
  const auto dir = dataset / "label_2";
  if (!std::filesystem::is_directory(dir)) {
    throw FormatError("no label_2 directory under " + dataset.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  LoadedLabels out;
  for (const auto& f : files) {
    try {
      out.frames.push_back(read_labels(f));
    } catch (const Error&) {
      out.unreadable.push_back(f.filename().string());
    }
  }
  return out;
}

}  // namespace

std::optional<double> ClassCount::apicc() const {
  if (total == 0 || frames_with == 0) return std::nullopt;
  return static_cast<double>(total) / static_cast<double>(frames_with);
}

ClassStats class_stats(const std::vector<std::vector<ObjectLabel>>& frames) {
  ClassStats s;
  s.frames = frames.size();
  for (const auto& frame : frames) {
    std::map<std::string, std::size_t> here;
    for (const auto& l : frame) {
      if (l.type != kDontCare) ++here[l.type];
    }
    for (const auto& [cls, n] : here) {
      ClassCount& c = s.classes[cls];
      c.total += n;
      ++c.frames_with;
    }
  }
  return s;
}

ClassStats class_stats(const std::filesystem::path& dataset) {
  LoadedLabels loaded = load_dataset_labels(dataset);
  ClassStats s = class_stats(loaded.frames);
  s.unreadable = std::move(loaded.unreadable);
  return s;
}

std::uint64_t BevHeatmap::total() const {
  std::uint64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

std::optional<std::pair<int, int>> BevHeatmap::cell_of(double x, double z) const {
  if (!(x >= x_min && x < x_max && z >= z_min && z < z_max)) return std::nullopt;
  const int col = std::min(cols - 1, static_cast<int>(std::floor((x - x_min) / cell_size)));
  const int row = std::min(rows - 1, static_cast<int>(std::floor((z - z_min) / cell_size)));
  return std::pair{col, row};
}

BevHeatmap bev_heatmap(const std::vector<std::vector<ObjectLabel>>& frames,
                       const std::optional<std::string>& cls, double cell_size) {
  if (!(cell_size > 0.0)) throw InvalidArgument("heatmap cell size must be positive");
  BevHeatmap map;
  map.cell_size = cell_size;
  map.cols = static_cast<int>(std::ceil((map.x_max - map.x_min) / cell_size - 1e-9));
  map.rows = static_cast<int>(std::ceil((map.z_max - map.z_min) / cell_size - 1e-9));
  map.counts.assign(static_cast<std::size_t>(map.cols) * map.rows, 0);
  for (const auto& frame : frames) {
    for (const auto& l : frame) {
      if (l.type == kDontCare || (cls && l.type != *cls)) continue;
      if (auto cell = map.cell_of(l.location.x(), l.location.z())) {
        ++map.counts[std::size_t(cell->second) * map.cols + cell->first];
      }
    }
  }
  return map;
}

BevHeatmap bev_heatmap(const std::filesystem::path& dataset, const std::optional<std::string>& cls,
                       double cell_size) {
  return bev_heatmap(load_dataset_labels(dataset).frames, cls, cell_size);
}

void write_heatmap_pgm(const BevHeatmap& map, const std::filesystem::path& path) {
  std::uint32_t peak = 0;
  for (auto c : map.counts) peak = std::max(peak, c);
  std::string out =
      "P5\n" + std::to_string(map.cols) + " " + std::to_string(map.rows) + "\n255\n";
  for (int row = map.rows - 1; row >= 0; --row) {
    for (int col = 0; col < map.cols; ++col) {
      const std::uint32_t c = map.at(col, row);
      const auto level = peak == 0 ? 0 : static_cast<unsigned>((255ull * c + peak / 2) / peak);
      out.push_back(static_cast<char>(level));
    }
  }
  write_file_atomic(path, out);
}

void write_heatmap_csv(const BevHeatmap& map, const std::filesystem::path& path) {
  std::string out;
  for (int row = 0; row < map.rows; ++row) {
    for (int col = 0; col < map.cols; ++col) {
      if (col) out.push_back(',');
      out += std::to_string(map.at(col, row));
    }
    out.push_back('\n');
  }
  write_file_atomic(path, out);
}

double chamfer_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  if (a.empty() || b.empty()) throw InvalidArgument("chamfer distance needs two non-empty sets");
  auto directed = [](const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
    double sum = 0.0;
    for (const Vec3& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const Vec3& q : to) best = std::min(best, (p - q).squaredNorm());
      sum += std::sqrt(best);
    }
    return sum / static_cast<double>(from.size());
  };
  return 0.5 * (directed(a, b) + directed(b, a));
}

CompareReport compare_backends(const Scene& scene, const Camera& camera, LidarConfig config,
                               const CompareOptions& options) {
  config.noise_sigma = 0.0;
  const RenderedFrame frame = render(scene, camera, options.workers);
  const PointCloud depth = generate_point_cloud(frame.depth, frame.instance, camera, config,
                                                options.workers);
  RaycastOptions ro;
  ro.use_proxy = options.use_proxy;
  ro.entity_range_limit = options.entity_range_limit;
  const PointCloud cast = raycast_point_cloud(scene, camera, config, ro, options.workers);

  std::map<EntityId, std::vector<Vec3>> by_depth;
  std::map<EntityId, std::vector<Vec3>> by_cast;
  for (const auto& p : depth.points) {
    if (is_entity_code(p.label)) by_depth[p.label].push_back(p.position.cast<double>());
  }
  for (const auto& p : cast.points) {
    if (is_entity_code(p.label)) by_cast[p.label].push_back(p.position.cast<double>());
  }

  CompareReport report;
  report.depth_total = depth.size();
  report.raycast_total = cast.size();
  std::vector<const Entity*> ordered;
  for (const Entity& e : scene.entities) ordered.push_back(&e);
  std::sort(ordered.begin(), ordered.end(),
            [](const Entity* a, const Entity* b) { return a->id < b->id; });
  for (const Entity* e : ordered) {
    EntityComparison c;
    c.id = e->id;
    c.cls = e->cls;
    c.model = e->model;
    c.distance = e->box.center.norm();
    const auto& d = by_depth[e->id];
    const auto& r = by_cast[e->id];
    c.depth_points = d.size();
    c.raycast_points = r.size();
    if (!d.empty() && !r.empty()) c.chamfer = chamfer_distance(d, r);
    if (!d.empty() && r.empty()) report.missed.push_back(e->id);
    report.entities.push_back(std::move(c));
  }
  return report;
}

}  // namespace lidarsynth
