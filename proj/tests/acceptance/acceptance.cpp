// Acceptance run: one pass/fail line per criterion, exit 0 iff all pass.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "lidarsynth/annotator.hpp"
#include "lidarsynth/kitti_io.hpp"
#include "lidarsynth/pipeline.hpp"
#include "lidarsynth/render.hpp"
#include "lidarsynth/stats.hpp"
#include "lidarsynth/validation.hpp"
#include "lidarsynth_tools/commands.hpp"
#include "oracles.hpp"

using namespace lidarsynth;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int n, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %d. %s: %s\n", pass ? "PASS" : "FAIL", n, name.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += !pass;
}

template <typename F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

LidarConfig noise_free() {
  LidarConfig c;
  c.noise_sigma = 0.0;
  return c;
}

int cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = tools::run_cli(args, out, err);
  if (code != 0) std::cerr << err.str();
  return code;
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = oracle::slurp(e.path());
  }
  return out;
}

void scan_pattern() {
  ScanPattern p;
  const double t = seconds([&] { p = build_scan_pattern(LidarConfig{}); });
  report(1, "scan pattern", p.phis.size() == 64 && p.thetas.size() == 999 && t < 1.0,
         fmt("%zu beams x %zu columns in %.4f s", p.phis.size(), p.thetas.size(), t));
}

void codec_round_trip() {
  const Camera c = Camera::dataset_default();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, c.width() - 1), v(0, c.height() - 1);
  std::uniform_real_distribution<double> r(c.near_clip(), 0.99 * c.far_clip());
  double worst = 0.0;
  const double t = seconds([&] {
    for (int i = 0; i < 100000; ++i) {
      const PixelCoord px{std::round(u(rng)), std::round(v(rng))};
      // Ranges below the pixel's own near-plane distance are not representable.
      const double range = std::max(r(rng), near_plane_distance(px, c));
      worst = std::max(worst, std::abs(decode_depth(encode_depth(range, px, c), px, c) - range));
    }
  });
  report(2, "depth codec round trip", worst < 1e-6 && t < 1.0,
         fmt("max error %.3g m over 1e5 pairs in %.3f s", worst, t));
}

void oracle_equivalence() {
  const Camera c = Camera::dataset_default();
  bool pass = true;
  std::string detail;
  for (const char* name : {"wall", "sphere", "slope"}) {
    const Scene s = make_builtin_scene(name);
    double t = seconds([&] {
      const RenderedFrame f = render(s, c);
      generate_point_cloud(f.depth, f.instance, c, noise_free());
    });
    const OracleStats o = oracle_stats(s, c, noise_free());
    const double within = double(o.within_1pct) / double(o.points);
    const double over = double(o.over_2pct) / double(o.points);
    pass = pass && o.points > 0 && within >= 0.99 && over <= 0.001 && t < 10.0;
    detail += fmt("%s%s %.3f%% within 1%%, %.4f%% over 2%%, scan %.2f s", detail.empty() ? "" : "; ",
                  name, 100 * within, 100 * over, t);
  }
  report(3, "oracle equivalence", pass, detail);
}

void gate() {
  const Camera c = Camera::dataset_default();
  LidarConfig l = noise_free();
  const GateStats on = gate_stats(20.0, 1.2, c, l);
  l.gate_ratio = 10.0;
  const GateStats off = gate_stats(20.0, 1.2, c, l);
  report(4, "gate property", on.points > 0 && on.floating == 0 && off.floating > 0,
         fmt("%zu floating of %zu at ratio 1.08; %zu at ratio 10 (negative control)", on.floating,
             on.points, off.floating));
}

void noise() {
  const NoiseStats n = noise_stats(100000, 0.006, 12345);
  report(5, "noise statistics",
         std::abs(n.stddev - 0.006) <= 0.05 * 0.006 && n.tail_fraction <= 0.002,
         fmt("std %.4f mm, %.4f%% at or beyond 2 cm", 1000 * n.stddev, 100 * n.tail_fraction));
}

void ray_casting_contrast() {
  const Scene s = make_street_basic_scene();
  const CompareReport r = compare_backends(s, Camera::dataset_default(), LidarConfig{});
  bool pass = true;
  std::string detail;
  for (const EntityComparison& e : r.entities) {
    if (e.cls == ObjectClass::Car && e.distance > 30.0) {
      pass = pass && e.raycast_points == 0 && e.depth_points > 20;
      detail += fmt("car %u at %.0f m: %zu ray-cast / %zu depth points; ", e.id, e.distance,
                    e.raycast_points, e.depth_points);
    }
    if (e.cls == ObjectClass::Pedestrian) {
      pass = pass && e.chamfer && *e.chamfer > 0.02;
      detail += fmt("pedestrian %u Chamfer %.3f m; ", e.id, e.chamfer.value_or(0.0));
    }
  }
  detail.resize(detail.size() - 2);
  report(6, "ray-casting contrast", pass, detail);
}

void pitched_vehicle() {
  const Camera c = Camera::dataset_default();
  const Scene s = make_slope_scene();
  FrameOptions o;
  o.lidar = noise_free();
  o.color = false;
  const ProcessedFrame f = process_frame(s, c, o);
  const Entity& car = s.entities.at(0);
  const double pitched = fraction_inside(f.artifacts.cloud, car.id, car.box, 0.02);
  const double yaw_only = fraction_inside(f.artifacts.cloud, car.id, car.box.yaw_only(), 0.02);
  report(7, "pitched vehicle", pitched >= 0.99 && yaw_only < 0.95,
         fmt("%.2f%% inside the pitch-aware box, %.2f%% inside the yaw-only box", 100 * pitched,
             100 * yaw_only));
}

void point_label_consistency(const fs::path& work) {
  const fs::path ds = work / "consistency";
  const std::uint64_t seed = 2024;
  const int frames = 20;
  if (cli({"dataset", "-s", "random", "--seed", std::to_string(seed), "-n", std::to_string(frames),
           "--no-noise", "--no-color", "-o", ds.string()}) != 0) {
    report(8, "point/label consistency", false, "dataset command failed");
    return;
  }
  std::size_t points = 0, inside = 0, labels = 0, mismatches = 0;
  for (int i = 0; i < frames; ++i) {
    const std::string name = frame_name(i);
    const Scene scene = make_builtin_scene("random", {}, seed + i);
    const PointCloud cloud =
        read_point_cloud(ds / "velodyne" / (name + ".bin"), ds / "velodyne_ids" / (name + ".bin"));
    for (const LidarPoint& p : cloud.points) {
      if (!is_entity_code(p.label)) continue;
      ++points;
      const Entity* e = scene.find(p.label);
      inside += e && point_in_oriented_box(p.position.cast<double>(), e->box, 0.02);
    }
    const auto ext = read_extended_labels(ds / "extended" / (name + ".txt"));
    const SegmentationImage seg = read_segmentation(ds / "seg" / (name + ".bin"));
    for (const ExtendedLabel& x : ext) {
      std::size_t n = 0;
      for (std::uint32_t code : seg.values()) n += code == x.entity_id;
      ++labels;
      mismatches += n != x.pixel_count;
    }
  }
  const double frac = points ? double(inside) / double(points) : 0.0;
  report(8, "point/label consistency", points > 0 && frac >= 0.99 && mismatches == 0,
         fmt("%d frames, %.3f%% of %zu entity points inside their box, %zu of %zu pixel counts "
             "differ from a recount",
             frames, 100 * frac, points, mismatches, labels));
}

void format_round_trips(const fs::path& work) {
  const fs::path dir = work / "formats";
  fs::create_directories(dir);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  std::string detail;
  bool pass = true;

  PointCloud cloud;
  for (int i = 0; i < 3; ++i) {
    LidarPoint p;
    p.position = Eigen::Vector3f(float(u(rng) * 50), float(u(rng) * 5), float(30 + u(rng) * 20));
    p.label = std::uint32_t(rng());
    cloud.points.push_back(p);
  }
  write_point_cloud(cloud, dir / "c.bin", dir / "c.ids");
  const auto bin_size = fs::file_size(dir / "c.bin");
  const auto ids_size = fs::file_size(dir / "c.ids");
  const PointCloud back = read_point_cloud(dir / "c.bin", dir / "c.ids");
  bool exact = back.size() == 3;
  for (std::size_t i = 0; exact && i < 3; ++i) {
    exact = std::memcmp(back.points[i].position.data(), cloud.points[i].position.data(), 12) == 0 &&
            back.points[i].label == cloud.points[i].label;
  }
  pass = pass && exact && bin_size == 48 && ids_size == 12;
  detail += fmt("cloud %s, %ju + %ju bytes", exact ? "bit-exact" : "differs", std::uintmax_t(bin_size),
                std::uintmax_t(ids_size));

  std::vector<ObjectLabel> labels;
  std::vector<ExtendedLabel> ext;
  for (int i = 0; i < 50; ++i) {
    ObjectLabel l;
    l.type = i % 7 == 0 ? "DontCare" : (i % 2 ? "Car" : "Pedestrian");
    l.truncated = 0.5 + 0.5 * u(rng);
    l.occluded = int(rng() % 4);
    l.alpha = kPi * u(rng);
    l.bbox = {400 + 300 * u(rng), 300 + 100 * u(rng), 1000 + 300 * u(rng), 700 + 100 * u(rng)};
    l.h = 1.5 + u(rng);
    l.w = 1.7 + u(rng);
    l.l = 4 + u(rng);
    l.location = Vec3(20 * u(rng), 1.7 + u(rng), 40 + 30 * u(rng));
    l.rotation_y = kPi * u(rng);
    labels.push_back(l);
    ext.push_back({EntityId(i + 1), std::size_t(rng() % 100000), 10 + 10 * u(rng), "model_" + std::to_string(i),
                   0.2 * u(rng), 0.1 * u(rng)});
  }
  write_labels(labels, dir / "l.txt");
  write_extended_labels(ext, dir / "e.txt");
  const auto lb = read_labels(dir / "l.txt");
  const auto eb = read_extended_labels(dir / "e.txt", labels.size());
  double worst = 0.0;
  bool fields = lb.size() == labels.size() && eb.size() == ext.size();
  for (std::size_t i = 0; fields && i < labels.size(); ++i) {
    const ObjectLabel& a = labels[i];
    const ObjectLabel& b = lb[i];
    fields = a.type == b.type && a.occluded == b.occluded && ext[i].entity_id == eb[i].entity_id &&
             ext[i].pixel_count == eb[i].pixel_count && ext[i].model == eb[i].model;
    for (double d : {a.truncated - b.truncated, a.alpha - b.alpha, a.bbox.left - b.bbox.left,
                     a.bbox.top - b.bbox.top, a.bbox.right - b.bbox.right, a.bbox.bottom - b.bbox.bottom,
                     a.h - b.h, a.w - b.w, a.l - b.l, a.location.x() - b.location.x(),
                     a.location.y() - b.location.y(), a.location.z() - b.location.z(),
                     a.rotation_y - b.rotation_y, ext[i].speed - eb[i].speed, ext[i].pitch - eb[i].pitch,
                     ext[i].roll - eb[i].roll}) {
      worst = std::max(worst, std::abs(d));
    }
  }
  pass = pass && fields && worst <= 0.005 + 1e-9;
  detail += fmt("; labels + extended max deviation %.4f", worst);

  const Calibration k = make_calibration(Camera::dataset_default());
  write_calibration(k, dir / "calib.txt");
  const bool calib = read_calibration(dir / "calib.txt") == k;
  pass = pass && calib;
  detail += calib ? "; calibration exact" : "; calibration differs";
  report(9, "format round trips", pass, detail);
}

void determinism(const fs::path& work) {
  const std::vector<std::string> base = {"dataset", "-s", "random", "--seed", "77", "-n", "4"};
  auto run = [&](const std::string& workers, const std::string& out) {
    std::vector<std::string> args = base;
    args.insert(args.end(), {"-j", workers, "-o", (work / out).string()});
    return cli(args) == 0;
  };
  if (!run("1", "det_a") || !run("1", "det_b") || !run("8", "det_c")) {
    report(10, "determinism", false, "dataset command failed");
    return;
  }
  const auto a = tree(work / "det_a");
  const bool rerun = a == tree(work / "det_b");
  const bool workers = a == tree(work / "det_c");
  report(10, "determinism", rerun && workers && !a.empty(),
         fmt("%zu files; rerun %s; workers 1 vs 8 %s", a.size(), rerun ? "identical" : "differs",
             workers ? "identical" : "differs"));
}

void stats_fixture(const fs::path& work) {
  const fs::path ds = work / "stats";
  fs::create_directories(ds / "label_2");
  auto label = [](const char* type, double x, double z) {
    ObjectLabel l;
    l.type = type;
    l.bbox = {1, 1, 2, 2};
    l.h = l.w = l.l = 1;
    l.location = Vec3(x, 1.7, z);
    return l;
  };
  // Cars per frame {3, 0, 2, 4}; pedestrians {0, 1, 0, 1}; 2 of the 11 objects
  // (x = 45 m, z = 120 m) fall outside the heatmap.
  const std::vector<std::vector<ObjectLabel>> frames = {
      {label("Car", 0, 10), label("Car", 5, 20), label("Car", 45, 20)},
      {label("Pedestrian", -3, 8), label(kDontCare, 0, 0)},
      {label("Car", 1, 30), label("Car", 2, 120)},
      {label("Car", -10, 5), label("Car", -12, 15), label("Car", 10, 50), label("Car", 39.9, 99.9),
       label("Pedestrian", 0, 40)}};
  for (std::size_t i = 0; i < frames.size(); ++i) write_labels(frames[i], ds / "label_2" / (frame_name(i) + ".txt"));
  const ClassStats s = class_stats(ds);
  const BevHeatmap m = bev_heatmap(ds, std::nullopt);
  const ClassCount& car = s.classes.at("Car");
  const ClassCount& ped = s.classes.at("Pedestrian");
  const bool pass = s.frames == 4 && car.total == 9 && car.frames_with == 3 && *car.apicc() == 3.0 &&
                    ped.total == 2 && *ped.apicc() == 1.0 && !s.classes.count(kDontCare) && m.total() == 9;
  report(11, "stats correctness", pass,
         fmt("Car count %zu, APICC %.2f; Pedestrian count %zu, APICC %.2f; heatmap mass %ju of 9 in extent",
             car.total, car.apicc().value_or(0), ped.total, ped.apicc().value_or(0),
             std::uintmax_t(m.total())));
}

}  // namespace

int main() {
  const fs::path work = oracle::temp_dir("acceptance");
  auto guarded = [](int n, const char* name, auto&& f) {
    try {
      f();
    } catch (const std::exception& e) {
      report(n, name, false, std::string("exception: ") + e.what());
    }
  };
  guarded(1, "scan pattern", scan_pattern);
  guarded(2, "depth codec round trip", codec_round_trip);
  guarded(3, "oracle equivalence", oracle_equivalence);
  guarded(4, "gate property", gate);
  guarded(5, "noise statistics", noise);
  guarded(6, "ray-casting contrast", ray_casting_contrast);
  guarded(7, "pitched vehicle", pitched_vehicle);
  guarded(8, "point/label consistency", [&] { point_label_consistency(work); });
  guarded(9, "format round trips", [&] { format_round_trips(work); });
  guarded(10, "determinism", [&] { determinism(work); });
  guarded(11, "stats correctness", [&] { stats_fixture(work); });
  fs::remove_all(work);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
