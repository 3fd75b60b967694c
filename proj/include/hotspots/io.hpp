#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hotspots/detection.hpp"
#include "hotspots/grid.hpp"
#include "hotspots/levels.hpp"
#include "hotspots/metrics.hpp"
#include "hotspots/roads.hpp"
#include "hotspots/simulation.hpp"
#include "hotspots/synth.hpp"

namespace hotspots {

using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal form of a double.
std::string format_number(double v);

/// FNV-1a 64-bit digest as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);
std::string file_digest(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
/// Writes atomically enough for a single-owner stage: truncate and write.
void write_file(const std::filesystem::path& path, std::string_view content);

// --- stops ----------------------------------------------------------------

/// CSV with a header naming `lon` and `lat` columns; other columns ignored.
/// Errors name the 1-based line number.
std::vector<GeoPoint> parse_stops_csv(std::istream& in, const std::string& source);
std::vector<GeoPoint> read_stops_csv(const std::filesystem::path& path);
std::string stops_csv(std::span<const GeoPoint> stops);

// --- roads ----------------------------------------------------------------

std::vector<Polyline> parse_roads_geojson(const std::string& text, const std::string& source);
std::string roads_geojson(std::span<const Polyline> lines);

RoadMask parse_road_cells_csv(std::istream& in, const GridSpec& grid, const std::string& source);
std::string road_cells_csv(const RoadMask& mask);

/// `.csv` files hold pre-rasterized row,col cells; anything else is GeoJSON.
RoadMask load_roads(const std::filesystem::path& path, const GridSpec& grid, int buffer_cells);

// --- grid -----------------------------------------------------------------

Json to_json(const GridSpec& g);
GridSpec grid_from_json(const Json& j);

// --- hotspots -------------------------------------------------------------

/// One JSON object per line: id, center {row, col, lon, lat}, members, stops, level.
std::string hotspots_jsonl(std::span<const Hotspot> hotspots, const GridSpec& grid);
std::vector<Hotspot> parse_hotspots_jsonl(const std::string& text, const std::string& source);
/// id,center_lon,center_lat,stops,level
std::string hotspots_csv(std::span<const Hotspot> hotspots, const GridSpec& grid);

std::string elbow_csv(const ElbowResult& elbow);
std::string level_table_csv(std::span<const LevelSummary> rows);

// --- synthetic ground truth -----------------------------------------------

Json to_json(const SyntheticCitySpec& spec);
SyntheticCitySpec synth_spec_from_json(const Json& j);
Json truth_json(const SyntheticCity& city);

// --- metrics --------------------------------------------------------------

Json to_json(const PatternReport& report);
PatternReport pattern_report_from_json(const Json& j);

/// Flattened curves of one level pair, keyed by file stem.
std::vector<std::pair<std::string, std::string>> pattern_report_csvs(const PatternReport& report);

// --- simulation -----------------------------------------------------------

Json to_json(const SimulationRun& run);
/// mechanism,level,d_rmse,q10,q50,q90
std::string rmse_csv(const MechanismResult& result);

struct RmseRow {
  std::string mechanism;
  int level = 0;
  double d_rmse = 0.0;
  double q10 = 0.0;
  double q50 = 0.0;
  double q90 = 0.0;
};
std::vector<RmseRow> parse_rmse_csv(const std::string& text, const std::string& source);

}  // namespace hotspots
