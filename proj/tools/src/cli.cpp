#include <CLI11.hpp>

#include "lidarsynth/error.hpp"
#include "lidarsynth_tools/commands.hpp"

namespace lidarsynth::tools {

namespace {

// Options shared by the scene-driven subcommands. Values given on the command
// line override the config file.
struct ConfigFlags {
  std::string config_path;
  std::string scene;
  std::string scene_file;
  std::vector<std::string> params;
  std::uint64_t seed = 0;
  int workers = 0;
  int width = 0;
  int height = 0;
  double fov_h = 0.0;
  double near_clip = 0.0;
  double far_clip = 0.0;
  double gate_ratio = 0.0;
  double noise_sigma = 0.0;
  double max_range = 0.0;
  double proxy_limit = 0.0;
  bool no_limit = false;
  bool no_noise = false;
  bool no_color = false;
  std::size_t min_pixels = 0;
  std::string out;
  int frames = 0;

  std::map<std::string, CLI::Option*> opt;

  void add(CLI::App* app, bool with_output, bool with_frames) {
    opt["config"] = app->add_option("-c,--config", config_path, "JSON run config")
                        ->check(CLI::ExistingFile);
    opt["scene"] = app->add_option("-s,--scene", scene, "built-in scene name");
    opt["scene-file"] = app->add_option("--scene-file", scene_file, "scene description file")
                            ->check(CLI::ExistingFile);
    opt["param"] = app->add_option("-p,--param", params, "scene parameter KEY=VALUE (repeatable)");
    opt["seed"] = app->add_option("--seed", seed, "master seed");
    opt["workers"] = app->add_option("-j,--workers", workers, "worker threads (0 = all cores)")
                         ->check(CLI::NonNegativeNumber);
    opt["width"] = app->add_option("--width", width, "image width (px)");
    opt["height"] = app->add_option("--height", height, "image height (px)");
    opt["fov-h"] = app->add_option("--fov-h", fov_h, "horizontal field of view (deg)");
    opt["near"] = app->add_option("--near", near_clip, "near clip distance (m)");
    opt["far"] = app->add_option("--far", far_clip, "far clip distance (m)");
    opt["gate-ratio"] = app->add_option("--gate-ratio", gate_ratio, "disparity gate ratio");
    opt["noise-sigma"] = app->add_option("--noise-sigma", noise_sigma, "radial noise std (m)");
    opt["max-range"] = app->add_option("--max-range", max_range, "maximum LiDAR range (m)");
    opt["proxy-limit"] = app->add_option("--proxy-limit", proxy_limit,
                                         "entity range limit for proxy ray casting (m)");
    opt["no-limit"] = app->add_flag("--no-limit", no_limit, "disable the entity range limit");
    opt["no-noise"] = app->add_flag("--no-noise", no_noise, "disable range noise");
    opt["no-color"] = app->add_flag("--no-color", no_color, "skip the preview image");
    opt["min-pixels"] = app->add_option("--min-pixels", min_pixels,
                                        "instance pixels below which labels become DontCare");
    if (with_output) opt["out"] = app->add_option("-o,--out", out, "output directory");
    if (with_frames) {
      opt["frames"] = app->add_option("-n,--frames", frames, "frame count")->check(CLI::PositiveNumber);
    }
  }

  bool given(const std::string& name) const {
    const auto it = opt.find(name);
    return it != opt.end() && it->second->count() > 0;
  }

  RunConfig resolve() const {
    RunConfig c = given("config") ? load_run_config(config_path) : RunConfig{};
    if (given("scene")) {
      c.scene = scene;
      c.scene_file.reset();
    }
    if (given("scene-file")) c.scene_file = scene_file;
    for (const std::string& kv : params) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) throw InvalidArgument("--param expects KEY=VALUE, got " + kv);
      try {
        std::size_t used = 0;
        const std::string value = kv.substr(eq + 1);
        c.scene_params[kv.substr(0, eq)] = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
      } catch (const std::logic_error&) {
        throw InvalidArgument("--param value is not a number: " + kv);
      }
    }
    if (given("seed")) c.seed = seed;
    if (given("workers")) c.workers = workers;
    if (given("width")) c.camera.width = width;
    if (given("height")) c.camera.height = height;
    if (given("fov-h")) c.camera.fov_h_deg = fov_h;
    if (given("near")) c.camera.near_clip = near_clip;
    if (given("far")) c.camera.far_clip = far_clip;
    if (given("gate-ratio")) c.lidar.gate_ratio = gate_ratio;
    if (given("noise-sigma")) c.lidar.noise_sigma = noise_sigma;
    if (given("max-range")) c.lidar.max_range = max_range;
    if (given("proxy-limit")) c.proxy_limit = proxy_limit;
    if (no_limit) c.proxy_limit.reset();
    if (no_noise) c.noise = false;
    if (no_color) c.color = false;
    if (given("min-pixels")) c.labels.min_pixels = min_pixels;
    if (given("out")) c.output = out;
    if (given("frames")) c.frames = frames;
    c.validate();
    return c;
  }
};

// Flags echoed into the manifest: everything except parallelism and the
// output location, which never change the dataset contents.
std::vector<std::string> provenance_flags(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i < args.size(); ++i) {
    const std::string& a = args[i];
    const bool takes_value = a == "-j" || a == "--workers" || a == "-o" || a == "--out";
    if (takes_value) {
      ++i;
      continue;
    }
    if (a.rfind("--workers=", 0) == 0 || a.rfind("--out=", 0) == 0) continue;
    out.push_back(a);
  }
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synthesizes LiDAR point clouds from rendered depth buffers and writes "
               "annotated KITTI-style datasets."};
  app.name("lidarsynth");
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  ConfigFlags render_flags, generate_flags, dataset_flags, validate_flags, compare_flags;
  std::size_t frame_index = 0;

  auto* render_cmd = app.add_subcommand("render", "render depth, segmentation and preview images");
  render_flags.add(render_cmd, true, false);
  render_cmd->add_option("--frame", frame_index, "frame index");

  auto* generate_cmd = app.add_subcommand("generate", "write every artifact of one frame");
  generate_flags.add(generate_cmd, true, false);
  generate_cmd->add_option("--frame", frame_index, "frame index");

  auto* dataset_cmd = app.add_subcommand("dataset", "write a multi-frame dataset with manifest");
  dataset_flags.add(dataset_cmd, true, true);

  auto* validate_cmd = app.add_subcommand("validate", "run the self-checks; exit 0 iff all pass");
  validate_flags.add(validate_cmd, false, true);
  std::string validate_report;
  validate_cmd->add_option("--report", validate_report, "write a JSON report");

  auto* stats_cmd = app.add_subcommand("stats", "class counts, APICC and BEV heatmap of a dataset");
  std::string dataset_path;
  StatsOptions stats_opts;
  std::string stats_class, stats_heatmap, stats_report;
  stats_cmd->add_option("dataset", dataset_path, "dataset directory")->required();
  auto* class_opt = stats_cmd->add_option("--class", stats_class, "heatmap class filter");
  stats_cmd->add_option("--cell", stats_opts.cell_size, "heatmap cell size (m)")
      ->check(CLI::PositiveNumber);
  auto* heatmap_opt = stats_cmd->add_option("--heatmap", stats_heatmap,
                                            "write <prefix>.pgm and <prefix>.csv");
  auto* stats_report_opt = stats_cmd->add_option("--report", stats_report, "write a JSON report");

  auto* compare_cmd = app.add_subcommand("compare", "depth-buffer scan vs proxy ray casting");
  compare_flags.add(compare_cmd, false, false);
  bool detailed = false;
  std::string compare_report;
  compare_cmd->add_flag("--detailed", detailed, "ray cast detailed geometry instead of proxies");
  auto* compare_report_opt = compare_cmd->add_option("--report", compare_report, "write a JSON report");

  std::vector<const char*> argv;
  argv.push_back("lidarsynth");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (render_cmd->parsed()) {
      cmd_render(render_flags.resolve(), frame_index, out);
    } else if (generate_cmd->parsed()) {
      cmd_generate(generate_flags.resolve(), frame_index, out);
    } else if (dataset_cmd->parsed()) {
      cmd_dataset(dataset_flags.resolve(), provenance_flags(args), out);
    } else if (validate_cmd->parsed()) {
      const RunConfig rc = validate_flags.resolve();
      ValidationConfig vc;
      vc.camera = rc.camera.make();
      vc.lidar = rc.lidar;
      if (!rc.noise) vc.lidar.noise_sigma = 0.0;
      vc.lidar.seed = rc.seed;
      vc.seed = rc.seed;
      vc.workers = rc.workers;
      vc.consistency_frames = validate_flags.given("frames") ? rc.frames : 4;
      std::optional<std::filesystem::path> report;
      if (!validate_report.empty()) report = validate_report;
      return cmd_validate(vc, out, report) ? 0 : 1;
    } else if (stats_cmd->parsed()) {
      if (class_opt->count()) stats_opts.cls = stats_class;
      if (heatmap_opt->count()) stats_opts.heatmap_prefix = stats_heatmap;
      if (stats_report_opt->count()) stats_opts.report = stats_report;
      cmd_stats(dataset_path, stats_opts, out);
    } else if (compare_cmd->parsed()) {
      std::optional<std::filesystem::path> report;
      if (compare_report_opt->count()) report = compare_report;
      cmd_compare(compare_flags.resolve(), !detailed, report, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace lidarsynth::tools
