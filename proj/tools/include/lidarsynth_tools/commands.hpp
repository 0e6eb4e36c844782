#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lidarsynth/stats.hpp"
#include "lidarsynth/validation.hpp"
#include "lidarsynth_tools/run_config.hpp"

namespace lidarsynth::tools {

inline constexpr const char* kToolVersion = "0.3.0";

/// Renders frame `frame` and writes depth, seg, stencil and image_2 files.
void cmd_render(const RunConfig& config, std::size_t frame, std::ostream& log);

/// Runs the full pipeline for one frame and writes all of its artifacts.
void cmd_generate(const RunConfig& config, std::size_t frame, std::ostream& log);

/// Writes config.frames frames plus manifest.json; returns the manifest.
/// `flags` are echoed into the manifest.
nlohmann::json cmd_dataset(const RunConfig& config, const std::vector<std::string>& flags,
                           std::ostream& log);

/// Prints one line per check; true iff no check failed.
bool cmd_validate(const ValidationConfig& config, std::ostream& out,
                  const std::optional<std::filesystem::path>& report);

struct StatsOptions {
  std::optional<std::string> cls;  // heatmap class filter
  double cell_size = kDefaultBevCell;
  std::optional<std::filesystem::path> heatmap_prefix;  // writes <prefix>.pgm and .csv
  std::optional<std::filesystem::path> report;
};

nlohmann::json stats_to_json(const ClassStats& stats, const BevHeatmap& heatmap);
nlohmann::json cmd_stats(const std::filesystem::path& dataset, const StatsOptions& options,
                         std::ostream& out);

nlohmann::json compare_to_json(const CompareReport& report, const std::string& scene,
                               const CompareOptions& options);
nlohmann::json cmd_compare(const RunConfig& config, bool use_proxy,
                           const std::optional<std::filesystem::path>& report, std::ostream& out);

/// Command-line entry point. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lidarsynth::tools
