#include "lidarsynth_tools/commands.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "lidarsynth/error.hpp"
#include "lidarsynth/kitti_io.hpp"
#include "lidarsynth/parallel.hpp"
#include "lidarsynth/pipeline.hpp"
#include "lidarsynth/render.hpp"

namespace lidarsynth::tools {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

FrameOptions frame_options(const RunConfig& c, std::size_t frame, int workers) {
  FrameOptions o;
  o.lidar = c.lidar_for(frame);
  o.labels = c.labels;
  o.color = c.color;
  o.workers = workers;
  return o;
}

json frame_report(std::size_t index, const Scene& scene, const FrameArtifacts& a) {
  return {{"index", index},
          {"name", frame_name(index)},
          {"scene", scene.name},
          {"entities", a.labels.report.entities},
          {"labeled", a.labels.report.labeled},
          {"dont_care", a.labels.report.dont_care},
          {"skipped", a.labels.report.skipped},
          {"points", a.cloud.size()}};
}

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

}  // namespace

void cmd_render(const RunConfig& config, std::size_t frame, std::ostream& log) {
  config.validate();
  const Camera camera = config.camera.make();
  const Scene scene = config.make_scene(frame);
  const RenderedFrame r = render(scene, camera, config.workers);
  const std::string name = frame_name(frame);
  for (const char* d : {"depth", "seg", "stencil", "image_2"}) fs::create_directories(config.output / d);
  write_depth_buffer(r.depth, config.output / "depth" / (name + ".bin"));
  write_segmentation(r.instance, config.output / "seg" / (name + ".bin"));
  write_segmentation(r.stencil, config.output / "stencil" / (name + ".bin"));
  write_ppm(shade_preview(r, camera), config.output / "image_2" / (name + ".ppm"));
  log << "rendered " << scene.name << " (" << camera.width() << "x" << camera.height() << ") to "
      << config.output.string() << "\n";
}

void cmd_generate(const RunConfig& config, std::size_t frame, std::ostream& log) {
  config.validate();
  const Camera camera = config.camera.make();
  const Scene scene = config.make_scene(frame);
  const ProcessedFrame f = process_frame(scene, camera, frame_options(config, frame, config.workers));
  write_frame(config.output, frame, f.artifacts);
  log << "frame " << frame_name(frame) << ": " << f.artifacts.cloud.size() << " points, "
      << f.artifacts.labels.labels.size() << " labels\n";
}

json cmd_dataset(const RunConfig& config, const std::vector<std::string>& flags,
                 std::ostream& log) {
  config.validate();
  const Camera camera = config.camera.make();
  fs::create_directories(config.output);
  for (const auto& d : dataset_subdirs()) fs::create_directories(config.output / d);

  const std::size_t frames = static_cast<std::size_t>(config.frames);
  const int workers = resolve_workers(config.workers);
  // Spread frames over the pool; a frame gets the whole pool only when alone.
  const int pool = static_cast<int>(std::min<std::size_t>(frames, workers));
  const int inner = pool > 1 ? 1 : workers;

  std::vector<json> reports(frames);
  std::vector<std::exception_ptr> errors(frames);
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < frames; i = next++) {
      try {
        const Scene scene = config.make_scene(i);
        const ProcessedFrame f = process_frame(scene, camera, frame_options(config, i, inner));
        write_frame(config.output, i, f.artifacts);
        reports[i] = frame_report(i, scene, f.artifacts);
        std::lock_guard lock(log_mutex);
        log << "frame " << frame_name(i) << ": " << f.artifacts.cloud.size() << " points, "
            << f.artifacts.labels.labels.size() << " labels\n";
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> threads;
    for (int t = 1; t < pool; ++t) threads.emplace_back(work);
    work();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  json manifest;
  manifest["tool"] = "lidarsynth";
  manifest["version"] = kToolVersion;
  manifest["seed"] = config.seed;
  manifest["config"] = to_json(config, true);
  manifest["flags"] = flags;
  manifest["layout"] = dataset_subdirs();
  manifest["frames"] = reports;
  write_file_atomic(config.output / "manifest.json", manifest.dump(2) + "\n");
  log << "wrote " << frames << " frames to " << config.output.string() << "\n";
  return manifest;
}

bool cmd_validate(const ValidationConfig& config, std::ostream& out,
                  const std::optional<fs::path>& report) {
  const auto results = run_validation(config);
  bool ok = true;
  json j = json::array();
  for (const CheckResult& r : results) {
    out << "[" << to_string(r.status) << "] " << r.name << ": " << r.detail << "\n";
    if (r.status == CheckStatus::Fail) ok = false;
    j.push_back({{"name", r.name},
                 {"status", std::string(to_string(r.status))},
                 {"detail", r.detail},
                 {"metrics", r.metrics}});
  }
  if (report) write_file_atomic(*report, json{{"checks", j}, {"passed", ok}}.dump(2) + "\n");
  return ok;
}

json stats_to_json(const ClassStats& stats, const BevHeatmap& heatmap) {
  json classes = json::object();
  for (const auto& [name, c] : stats.classes) {
    const auto apicc = c.apicc();
    classes[name] = {{"count", c.total},
                     {"frames_with", c.frames_with},
                     {"apicc", apicc ? json(*apicc) : json(nullptr)}};
  }
  return {{"frames", stats.frames},
          {"unreadable", stats.unreadable},
          {"classes", classes},
          {"heatmap",
           {{"cell_size", heatmap.cell_size},
            {"cols", heatmap.cols},
            {"rows", heatmap.rows},
            {"x_range", {heatmap.x_min, heatmap.x_max}},
            {"z_range", {heatmap.z_min, heatmap.z_max}},
            {"total", heatmap.total()}}}};
}

json cmd_stats(const fs::path& dataset, const StatsOptions& options, std::ostream& out) {
  if (!fs::is_directory(dataset)) throw InvalidArgument("dataset not found: " + dataset.string());
  const ClassStats stats = class_stats(dataset);
  const BevHeatmap map = bev_heatmap(dataset, options.cls, options.cell_size);
  char line[128];
  std::snprintf(line, sizeof line, "%-16s %8s %8s %8s\n", "class", "count", "frames", "apicc");
  out << line;
  for (const auto& [name, c] : stats.classes) {
    const auto apicc = c.apicc();
    std::snprintf(line, sizeof line, "%-16s %8zu %8zu %8s\n", name.c_str(), c.total,
                  c.frames_with, apicc ? fixed(*apicc, 2).c_str() : "-");
    out << line;
  }
  out << stats.frames << " frames";
  if (!stats.unreadable.empty()) out << ", " << stats.unreadable.size() << " unreadable";
  out << "; heatmap holds " << map.total() << " object centres\n";
  if (options.heatmap_prefix) {
    fs::path pgm = *options.heatmap_prefix;
    pgm += ".pgm";
    fs::path csv = *options.heatmap_prefix;
    csv += ".csv";
    write_heatmap_pgm(map, pgm);
    write_heatmap_csv(map, csv);
  }
  json j = stats_to_json(stats, map);
  if (options.report) write_file_atomic(*options.report, j.dump(2) + "\n");
  return j;
}

json compare_to_json(const CompareReport& report, const std::string& scene,
                     const CompareOptions& options) {
  json entities = json::array();
  for (const auto& e : report.entities) {
    entities.push_back({{"id", e.id},
                        {"class", std::string(to_string(e.cls))},
                        {"model", e.model},
                        {"distance", e.distance},
                        {"depth_points", e.depth_points},
                        {"raycast_points", e.raycast_points},
                        {"chamfer", e.chamfer ? json(*e.chamfer) : json(nullptr)}});
  }
  return {{"scene", scene},
          {"use_proxy", options.use_proxy},
          {"entity_range_limit",
           options.entity_range_limit ? json(*options.entity_range_limit) : json(nullptr)},
          {"depth_points", report.depth_total},
          {"raycast_points", report.raycast_total},
          {"entities", entities},
          {"missed", report.missed}};
}

json cmd_compare(const RunConfig& config, bool use_proxy, const std::optional<fs::path>& report,
                 std::ostream& out) {
  config.validate();
  const Scene scene = config.make_scene(0);
  CompareOptions opts;
  opts.use_proxy = use_proxy;
  opts.entity_range_limit = config.proxy_limit;
  opts.workers = config.workers;
  const CompareReport r = compare_backends(scene, config.camera.make(), config.lidar, opts);
  char line[160];
  std::snprintf(line, sizeof line, "%4s %-12s %-10s %9s %9s %9s %10s\n", "id", "class", "model",
                "dist_m", "depth", "raycast", "chamfer_m");
  out << line;
  for (const auto& e : r.entities) {
    std::snprintf(line, sizeof line, "%4u %-12s %-10s %9.2f %9zu %9zu %10s\n", e.id,
                  std::string(to_string(e.cls)).c_str(), e.model.c_str(), e.distance,
                  e.depth_points, e.raycast_points, e.chamfer ? fixed(*e.chamfer, 4).c_str() : "-");
    out << line;
  }
  out << "missed by ray casting:";
  if (r.missed.empty()) out << " none";
  for (EntityId id : r.missed) out << " " << id;
  out << "\n";
  json j = compare_to_json(r, scene.name, opts);
  if (report) write_file_atomic(*report, j.dump(2) + "\n");
  return j;
}

}  // namespace lidarsynth::tools
