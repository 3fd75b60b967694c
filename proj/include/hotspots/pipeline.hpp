#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hotspots/detection.hpp"
#include "hotspots/io.hpp"
#include "hotspots/metrics.hpp"
#include "hotspots/simulation.hpp"
#include "hotspots/synth.hpp"

namespace hotspots {

struct PipelineConfig {
  GridSpec grid;
  std::filesystem::path stops;  ///< resolved against the config file's directory
  std::filesystem::path roads;
  int road_buffer_cells = 0;
  DetectionParams detection;
  std::optional<int> levels_kept;  ///< use only the first L levels downstream
  MetricConfig metrics;
  ExperimentConfig simulation;
  std::uint64_t master_seed = 0;
  unsigned threads = 1;
  std::filesystem::path output_dir = "out";

  /// Propagates master_seed and threads into the metric and simulation configs.
  void sync();
};

/// Throws InputError for malformed config or a missing master_seed.
PipelineConfig pipeline_config_from_json(const Json& j, const std::filesystem::path& base_dir);
PipelineConfig load_pipeline_config(const std::filesystem::path& file);

/// Settings that determine stage outputs. Paths appear as file names only and
/// thread count is omitted, so the echo is identical across machines.
Json config_echo(const PipelineConfig& c);

struct StageResult {
  std::string stage;
  std::vector<std::string> outputs;  ///< file names relative to the output directory
  int exit_code = 0;
};

/// Writes stops.csv, roads.geojson, truth.json and a ready-to-run config.json.
StageResult run_synth(const SyntheticCitySpec& spec, const std::filesystem::path& out_dir, std::uint64_t master_seed);
StageResult run_detect(const PipelineConfig& c);
StageResult run_classify(const PipelineConfig& c);
StageResult run_metrics(const PipelineConfig& c);
/// exit_code is 4 when any cascade ended early.
StageResult run_simulate(const PipelineConfig& c);
StageResult run_report(const PipelineConfig& c);

/// Centers of the classified hotspots grouped by level, level 1 first.
std::vector<CellPointSet> levels_of(const std::vector<Hotspot>& classified, std::optional<int> levels_kept);

}  // namespace hotspots
