#include "hotspots/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hotspots/error.hpp"

namespace hotspots {

namespace fs = std::filesystem;

namespace {

std::string where(const std::string& source, std::size_t line) { return source + ":" + std::to_string(line) + ": "; }

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_int(std::string_view s, long long& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::size_t column_of(const std::vector<std::string_view>& header, std::string_view name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string h(trim(header[i]));
    std::transform(h.begin(), h.end(), h.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    if (h == name) return i;
  }
  return header.size();
}

// Reads non-blank lines with their 1-based numbers.
template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    fn(std::string_view(line), number);
  }
}

Json cells_json(const CellPointSet& s) {
  Json a = Json::array();
  for (const Cell c : s) a.push_back({c.row, c.col});
  return a;
}

Json band_json(const QuantileBand& b) {
  return {{"n_runs", b.n_runs}, {"q10", b.q10}, {"q50", b.q50}, {"q90", b.q90}};
}

QuantileBand band_from_json(const Json& j) {
  QuantileBand b;
  b.n_runs = j.at("n_runs").get<std::size_t>();
  b.q10 = j.at("q10").get<std::vector<double>>();
  b.q50 = j.at("q50").get<std::vector<double>>();
  b.q90 = j.at("q90").get<std::vector<double>>();
  return b;
}

Json null_band_json(const NullBand& b) { return {{"grid", b.grid}, {"band", band_json(b.band)}}; }
NullBand null_band_from_json(const Json& j) {
  return {j.at("grid").get<std::vector<double>>(), band_from_json(j.at("band"))};
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[std::size_t(i)] = digits[h & 0xf];
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string file_digest(const fs::path& path) { return fnv1a_hex(read_file(path)); }

void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out.write(content.data(), std::streamsize(content.size()));
  if (!out) throw InputError("write failed for " + path.string());
}

// --- stops ----------------------------------------------------------------

std::vector<GeoPoint> parse_stops_csv(std::istream& in, const std::string& source) {
  std::vector<GeoPoint> out;
  bool have_header = false;
  std::size_t lon_col = 0, lat_col = 0, width = 0;
  for_each_line(in, [&](std::string_view line, std::size_t number) {
    const auto fields = split_csv(line);
    if (!have_header) {
      lon_col = column_of(fields, "lon");
      lat_col = column_of(fields, "lat");
      if (lon_col == fields.size() || lat_col == fields.size())
        throw InputError(where(source, number) + "header must name 'lon' and 'lat' columns");
      width = fields.size();
      have_header = true;
      return;
    }
    if (fields.size() != width)
      throw InputError(where(source, number) + "expected " + std::to_string(width) + " fields, found " +
                       std::to_string(fields.size()));
    GeoPoint p;
    if (!parse_double(fields[lon_col], p.lon) || !parse_double(fields[lat_col], p.lat) || !std::isfinite(p.lon) ||
        !std::isfinite(p.lat))
      throw InputError(where(source, number) + "malformed coordinate '" + std::string(line) + "'");
    out.push_back(p);
  });
  return out;
}

std::vector<GeoPoint> read_stops_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open stops file " + path.string());
  return parse_stops_csv(in, path.filename().string());
}

std::string stops_csv(std::span<const GeoPoint> stops) {
  std::string out = "lon,lat\n";
  for (const auto& p : stops) out += format_number(p.lon) + "," + format_number(p.lat) + "\n";
  return out;
}

// --- roads ----------------------------------------------------------------

std::vector<Polyline> parse_roads_geojson(const std::string& text, const std::string& source) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(source + ": invalid JSON (" + e.what() + ")");
  }
  std::vector<Polyline> out;
  auto line_of = [&](const Json& coords, const std::string& ctx) {
    Polyline pl;
    if (!coords.is_array()) throw InputError(source + ": " + ctx + " coordinates must be an array");
    for (const auto& pos : coords) {
      if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number())
        throw InputError(source + ": " + ctx + " has a malformed position");
      pl.push_back({pos[0].get<double>(), pos[1].get<double>()});
    }
    return pl;
  };
  auto geometry = [&](const Json& g, const std::string& ctx) {
    if (g.is_null()) return;
    const std::string type = g.value("type", "");
    if (type == "LineString") {
      out.push_back(line_of(g.at("coordinates"), ctx));
    } else if (type == "MultiLineString") {
      for (const auto& part : g.at("coordinates")) out.push_back(line_of(part, ctx));
    } else {
      throw InputError(source + ": " + ctx + " has unsupported geometry type '" + type + "'");
    }
  };
  const std::string type = doc.value("type", "");
  if (type == "FeatureCollection") {
    const auto& features = doc.at("features");
    for (std::size_t i = 0; i < features.size(); ++i)
      geometry(features[i].at("geometry"), "feature " + std::to_string(i));
  } else if (type == "Feature") {
    geometry(doc.at("geometry"), "feature 0");
  } else {
    geometry(doc, "geometry");
  }
  return out;
}

std::string roads_geojson(std::span<const Polyline> lines) {
  Json features = Json::array();
  for (const auto& pl : lines) {
    Json coords = Json::array();
    for (const auto& p : pl) coords.push_back({p.lon, p.lat});
    features.push_back({{"type", "Feature"},
                        {"properties", Json::object()},
                        {"geometry", {{"type", "LineString"}, {"coordinates", coords}}}});
  }
  return Json{{"type", "FeatureCollection"}, {"features", features}}.dump() + "\n";
}

RoadMask parse_road_cells_csv(std::istream& in, const GridSpec& grid, const std::string& source) {
  std::vector<Cell> cells;
  bool have_header = false;
  std::size_t row_col = 0, col_col = 0;
  for_each_line(in, [&](std::string_view line, std::size_t number) {
    const auto fields = split_csv(line);
    if (!have_header) {
      row_col = column_of(fields, "row");
      col_col = column_of(fields, "col");
      if (row_col == fields.size() || col_col == fields.size())
        throw InputError(where(source, number) + "header must name 'row' and 'col' columns");
      have_header = true;
      return;
    }
    long long r = 0, c = 0;
    if (fields.size() <= std::max(row_col, col_col) || !parse_int(fields[row_col], r) || !parse_int(fields[col_col], c))
      throw InputError(where(source, number) + "malformed cell '" + std::string(line) + "'");
    const Cell cell{static_cast<std::int32_t>(r), static_cast<std::int32_t>(c)};
    if (r != cell.row || c != cell.col || !grid.contains(cell))
      throw InputError(where(source, number) + "cell outside the grid");
    cells.push_back(cell);
  });
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return RoadMask(grid, std::move(cells));
}

std::string road_cells_csv(const RoadMask& mask) {
  std::string out = "row,col\n";
  for (const Cell c : mask.cells()) out += std::to_string(c.row) + "," + std::to_string(c.col) + "\n";
  return out;
}

RoadMask load_roads(const fs::path& path, const GridSpec& grid, int buffer_cells) {
  if (path.extension() == ".csv") {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open roads file " + path.string());
    return parse_road_cells_csv(in, grid, path.filename().string());
  }
  const auto lines = parse_roads_geojson(read_file(path), path.filename().string());
  return rasterize_roads(lines, grid, buffer_cells);
}

// --- grid -----------------------------------------------------------------

Json to_json(const GridSpec& g) {
  return {{"origin_lon", g.origin_lon}, {"origin_lat", g.origin_lat}, {"cell_size", g.cell_size},
          {"n_rows", g.n_rows},         {"n_cols", g.n_cols},         {"ref_latitude", g.ref_latitude}};
}

GridSpec grid_from_json(const Json& j) {
  GridSpec g;
  try {
    g.origin_lon = j.at("origin_lon").get<double>();
    g.origin_lat = j.at("origin_lat").get<double>();
    g.cell_size = j.value("cell_size", 10.0);
    g.n_rows = j.at("n_rows").get<std::int32_t>();
    g.n_cols = j.at("n_cols").get<std::int32_t>();
    g.ref_latitude = j.value("ref_latitude", g.origin_lat);
  } catch (const Json::exception& e) {
    throw InputError(std::string("grid spec: ") + e.what());
  }
  g.validate();
  return g;
}

// --- hotspots -------------------------------------------------------------

std::string hotspots_jsonl(std::span<const Hotspot> hotspots, const GridSpec& grid) {
  std::string out;
  for (const auto& h : hotspots) {
    const GeoPoint geo = unproject(grid.center(h.center), grid);
    Json members = Json::array();
    for (const Cell c : h.members) members.push_back({c.row, c.col});
    Json j{{"id", h.id},
           {"center", {{"row", h.center.row}, {"col", h.center.col}, {"lon", geo.lon}, {"lat", geo.lat}}},
           {"members", members},
           {"stops", h.stops},
           {"level", h.level ? Json(*h.level) : Json(nullptr)}};
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<Hotspot> parse_hotspots_jsonl(const std::string& text, const std::string& source) {
  std::vector<Hotspot> out;
  std::istringstream in(text);
  for_each_line(in, [&](std::string_view line, std::size_t number) {
    try {
      const Json j = Json::parse(line);
      Hotspot h;
      h.id = j.at("id").get<std::size_t>();
      h.center = {j.at("center").at("row").get<std::int32_t>(), j.at("center").at("col").get<std::int32_t>()};
      for (const auto& m : j.at("members")) h.members.push_back({m.at(0).get<std::int32_t>(), m.at(1).get<std::int32_t>()});
      h.stops = j.at("stops").get<std::uint64_t>();
      if (!j.at("level").is_null()) h.level = j.at("level").get<int>();
      out.push_back(std::move(h));
    } catch (const Json::exception& e) {
      throw InputError(where(source, number) + e.what());
    }
  });
  return out;
}

std::string hotspots_csv(std::span<const Hotspot> hotspots, const GridSpec& grid) {
  std::string out = "id,center_lon,center_lat,stops,level\n";
  for (const auto& h : hotspots) {
    const GeoPoint geo = unproject(grid.center(h.center), grid);
    out += std::to_string(h.id) + "," + format_number(geo.lon) + "," + format_number(geo.lat) + "," +
           std::to_string(h.stops) + "," + (h.level ? std::to_string(*h.level) : std::string()) + "\n";
  }
  return out;
}

std::string elbow_csv(const ElbowResult& elbow) {
  std::string out = "radius_cells,local_maxima,selected\n";
  for (std::size_t i = 0; i < elbow.radii.size(); ++i)
    out += std::to_string(elbow.radii[i]) + "," + std::to_string(elbow.maxima_counts[i]) + "," +
           (elbow.radii[i] == elbow.radius ? "1" : "0") + "\n";
  return out;
}

std::string level_table_csv(std::span<const LevelSummary> rows) {
  std::string out = "level,hotspots,stop_fraction_lo,stop_fraction_hi,min_stops,max_stops,median_stops\n";
  for (const auto& r : rows)
    out += std::to_string(r.level) + "," + std::to_string(r.hotspot_count) + "," + format_number(r.stop_fraction_lo) +
           "," + format_number(r.stop_fraction_hi) + "," + std::to_string(r.min_stops) + "," +
           std::to_string(r.max_stops) + "," + format_number(r.median_stops) + "\n";
  return out;
}

// --- synthetic ground truth -----------------------------------------------

namespace {

const char* placement_name(Placement p) {
  switch (p) {
    case Placement::Spawn:
      return "spawn";
    case Placement::Knn:
      return "knn";
    case Placement::Uniform:
      return "uniform";
  }
  return "knn";
}

Placement parse_placement(const std::string& s) {
  if (s == "spawn") return Placement::Spawn;
  if (s == "knn") return Placement::Knn;
  if (s == "uniform") return Placement::Uniform;
  throw InputError("synth spec: unknown placement '" + s + "'");
}

}  // namespace

Json to_json(const SyntheticCitySpec& s) {
  return {{"grid", to_json(s.grid)},
          {"street_spacing_cells", s.street_spacing_cells},
          {"detection_radius_cells", s.detection_radius_cells},
          {"spacing_cells", s.spacing_cells},
          {"border_m", s.border_m},
          {"cluster_sizes", s.cluster_sizes},
          {"cluster_radius_m", s.cluster_radius_m},
          {"cluster_separation_m", s.cluster_separation_m},
          {"level_multipliers", s.level_multipliers},
          {"placement", placement_name(s.placement)},
          {"accompany_decay_m", s.accompany_decay_m},
          {"planting",
           {{"k", s.planting.k}, {"alpha", s.planting.alpha}, {"d_cut", s.planting.d_cut}}},
          {"inhibition",
           {{"enabled", s.inhibition.enabled},
            {"radius_m", s.inhibition.radius_m},
            {"dense_threshold", s.inhibition.dense_threshold},
            {"cap", s.inhibition.cap}}},
          {"stops_per_level", s.stops_per_level},
          {"core_fraction", s.core_fraction},
          {"scatter_sigma_m", s.scatter_sigma_m},
          {"noise_stops", s.noise_stops},
          {"seed", s.seed}};
}

SyntheticCitySpec synth_spec_from_json(const Json& j) {
  SyntheticCitySpec s;
  try {
    if (j.contains("grid")) s.grid = grid_from_json(j.at("grid"));
    s.street_spacing_cells = j.value("street_spacing_cells", s.street_spacing_cells);
    s.detection_radius_cells = j.value("detection_radius_cells", s.detection_radius_cells);
    s.spacing_cells = j.value("spacing_cells", s.spacing_cells);
    s.border_m = j.value("border_m", s.border_m);
    s.cluster_sizes = j.value("cluster_sizes", s.cluster_sizes);
    s.cluster_radius_m = j.value("cluster_radius_m", s.cluster_radius_m);
    s.cluster_separation_m = j.value("cluster_separation_m", s.cluster_separation_m);
    s.level_multipliers = j.value("level_multipliers", s.level_multipliers);
    if (j.contains("placement")) s.placement = parse_placement(j.at("placement").get<std::string>());
    s.accompany_decay_m = j.value("accompany_decay_m", s.accompany_decay_m);
    if (j.contains("planting")) {
      const auto& p = j.at("planting");
      s.planting.k = p.value("k", s.planting.k);
      s.planting.alpha = p.value("alpha", s.planting.alpha);
      s.planting.d_cut = p.value("d_cut", s.planting.d_cut);
    }
    if (j.contains("inhibition")) {
      const auto& i = j.at("inhibition");
      s.inhibition.enabled = i.value("enabled", s.inhibition.enabled);
      s.inhibition.radius_m = i.value("radius_m", s.inhibition.radius_m);
      s.inhibition.dense_threshold = i.value("dense_threshold", s.inhibition.dense_threshold);
      s.inhibition.cap = i.value("cap", s.inhibition.cap);
    }
    s.stops_per_level = j.value("stops_per_level", s.stops_per_level);
    s.core_fraction = j.value("core_fraction", s.core_fraction);
    s.scatter_sigma_m = j.value("scatter_sigma_m", s.scatter_sigma_m);
    s.noise_stops = j.value("noise_stops", s.noise_stops);
    s.seed = j.value("seed", s.seed);
  } catch (const Json::exception& e) {
    throw InputError(std::string("synth spec: ") + e.what());
  }
  return s;
}

Json truth_json(const SyntheticCity& city) {
  Json centers = Json::array();
  for (const auto& h : city.truth) {
    const GeoPoint geo = unproject(city.grid.center(h.center), city.grid);
    centers.push_back(
        {{"row", h.center.row}, {"col", h.center.col}, {"lon", geo.lon}, {"lat", geo.lat}, {"level", h.level},
         {"stops", h.stops}});
  }
  return {{"grid", to_json(city.grid)},
          {"road_cells", city.roads.cells().size()},
          {"stops", city.stops.size()},
          {"inhibited_children", city.inhibited},
          {"centers", centers}};
}

// --- metrics --------------------------------------------------------------

Json to_json(const PatternReport& report) {
  const auto& c = report.config;
  Json pairs = Json::array();
  for (const auto& p : report.pairs) {
    Json inhibit = Json::array();
    for (const auto& ir : p.inhibit) {
      Json same = Json::array(), next = Json::array(), cx = Json::array(), cy = Json::array();
      for (const auto& d : ir.pairs.pairs) {
        same.push_back(d.same_level);
        next.push_back(d.next_level);
      }
      for (const auto& pt : ir.curve) {
        cx.push_back(pt.x);
        cy.push_back(pt.y);
      }
      inhibit.push_back({{"d_count", ir.d_count},
                         {"same_level", same},
                         {"next_level", next},
                         {"curve_same_level", cx},
                         {"curve_next_level", cy}});
    }
    pairs.push_back({{"upper_level", p.upper_level},
                     {"n_upper", p.n_upper},
                     {"n_lower", p.n_lower},
                     {"knn", {{"k", p.knn.ks}, {"mean_distance_m", p.knn.values}}},
                     {"coverage", {{"radius_m", p.coverage.radii}, {"ratio", p.coverage.values}}},
                     {"inhibit", inhibit},
                     {"knn_random1", null_band_json(p.knn_random1)},
                     {"knn_random2", null_band_json(p.knn_random2)},
                     {"coverage_random1", null_band_json(p.coverage_random1)},
                     {"coverage_random2", null_band_json(p.coverage_random2)}});
  }
  return {{"config",
           {{"k_max", c.k_max},
            {"r_grid", c.r_grid},
            {"d_counts", c.d_counts},
            {"n_runs", c.n_runs},
            {"master_seed", c.master_seed}}},
          {"pairs", pairs}};
}

PatternReport pattern_report_from_json(const Json& j) {
  PatternReport r;
  try {
    const auto& c = j.at("config");
    r.config.k_max = c.at("k_max").get<int>();
    r.config.r_grid = c.at("r_grid").get<std::vector<double>>();
    r.config.d_counts = c.at("d_counts").get<std::vector<double>>();
    r.config.n_runs = c.at("n_runs").get<std::size_t>();
    r.config.master_seed = c.at("master_seed").get<std::uint64_t>();
    for (const auto& pj : j.at("pairs")) {
      LevelPairReport p;
      p.upper_level = pj.at("upper_level").get<int>();
      p.n_upper = pj.at("n_upper").get<std::size_t>();
      p.n_lower = pj.at("n_lower").get<std::size_t>();
      p.knn.ks = pj.at("knn").at("k").get<std::vector<int>>();
      p.knn.values = pj.at("knn").at("mean_distance_m").get<std::vector<double>>();
      p.coverage.radii = pj.at("coverage").at("radius_m").get<std::vector<double>>();
      p.coverage.values = pj.at("coverage").at("ratio").get<std::vector<double>>();
      for (const auto& ij : pj.at("inhibit")) {
        InhibitResult ir;
        ir.d_count = ij.at("d_count").get<double>();
        ir.pairs.d_count = ir.d_count;
        const auto same = ij.at("same_level").get<std::vector<double>>();
        const auto next = ij.at("next_level").get<std::vector<double>>();
        for (std::size_t i = 0; i < same.size() && i < next.size(); ++i) ir.pairs.pairs.push_back({same[i], next[i]});
        const auto cx = ij.at("curve_same_level").get<std::vector<double>>();
        const auto cy = ij.at("curve_next_level").get<std::vector<double>>();
        for (std::size_t i = 0; i < cx.size() && i < cy.size(); ++i) ir.curve.push_back({cx[i], cy[i]});
        p.inhibit.push_back(std::move(ir));
      }
      p.knn_random1 = null_band_from_json(pj.at("knn_random1"));
      p.knn_random2 = null_band_from_json(pj.at("knn_random2"));
      p.coverage_random1 = null_band_from_json(pj.at("coverage_random1"));
      p.coverage_random2 = null_band_from_json(pj.at("coverage_random2"));
      r.pairs.push_back(std::move(p));
    }
  } catch (const Json::exception& e) {
    throw InputError(std::string("pattern report: ") + e.what());
  }
  return r;
}

std::vector<std::pair<std::string, std::string>> pattern_report_csvs(const PatternReport& report) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& p : report.pairs) {
    const std::string tag = "L" + std::to_string(p.upper_level) + "_L" + std::to_string(p.upper_level + 1);
    std::string knn = "k,observed_m,random1_q10,random1_q50,random1_q90,random2_q10,random2_q50,random2_q90\n";
    for (std::size_t i = 0; i < p.knn.ks.size(); ++i) {
      knn += std::to_string(p.knn.ks[i]) + "," + format_number(p.knn.values[i]);
      for (const auto* b : {&p.knn_random1.band, &p.knn_random2.band})
        knn += "," + format_number(b->q10.at(i)) + "," + format_number(b->q50.at(i)) + "," + format_number(b->q90.at(i));
      knn += "\n";
    }
    out.emplace_back("knn_" + tag, std::move(knn));

    std::string cov = "radius_m,observed,random1_q10,random1_q50,random1_q90,random2_q10,random2_q50,random2_q90\n";
    for (std::size_t i = 0; i < p.coverage.radii.size(); ++i) {
      cov += format_number(p.coverage.radii[i]) + "," + format_number(p.coverage.values[i]);
      for (const auto* b : {&p.coverage_random1.band, &p.coverage_random2.band})
        cov += "," + format_number(b->q10.at(i)) + "," + format_number(b->q50.at(i)) + "," + format_number(b->q90.at(i));
      cov += "\n";
    }
    out.emplace_back("coverage_" + tag, std::move(cov));

    for (const auto& ir : p.inhibit) {
      std::string csv = "same_level,next_level\n";
      for (const auto& pt : ir.curve) csv += format_number(pt.x) + "," + format_number(pt.y) + "\n";
      out.emplace_back("inhibit_" + tag + "_d" + format_number(ir.d_count), std::move(csv));
    }
  }
  return out;
}

// --- simulation -----------------------------------------------------------

Json to_json(const SimulationRun& run) {
  Json levels = Json::array();
  for (const auto& l : run.levels)
    levels.push_back({{"level", l.level},
                      {"observed", l.observed},
                      {"background", cells_json(l.background)},
                      {"simulated", cells_json(l.simulated)},
                      {"candidates_before", l.candidates_before},
                      {"candidates_after", l.candidates_after}});
  return {{"seed", run.seed},
          {"params",
           {{"mechanism", to_string(run.params.mechanism)},
            {"k", run.params.k},
            {"alpha", run.params.alpha},
            {"d_cut", run.params.d_cut},
            {"x_radius_cells", run.params.x_radius_cells}}},
          {"complete", run.complete},
          {"failed_level", run.failed_level ? Json(*run.failed_level) : Json(nullptr)},
          {"failure", run.failure},
          {"levels", levels}};
}

std::string rmse_csv(const MechanismResult& result) {
  std::string out = "mechanism,level,d_rmse,q10,q50,q90\n";
  for (const auto& curve : result.levels)
    for (std::size_t j = 0; j < curve.d_rmse.size(); ++j) {
      out += std::string(to_string(curve.mechanism)) + "," + std::to_string(curve.level) + "," +
             format_number(curve.d_rmse[j]);
      if (curve.band.n_runs == 0)
        out += ",,,";
      else
        out += "," + format_number(curve.band.q10[j]) + "," + format_number(curve.band.q50[j]) + "," +
               format_number(curve.band.q90[j]);
      out += "\n";
    }
  return out;
}

std::vector<RmseRow> parse_rmse_csv(const std::string& text, const std::string& source) {
  std::vector<RmseRow> out;
  std::istringstream in(text);
  bool header = true;
  for_each_line(in, [&](std::string_view line, std::size_t number) {
    if (header) {
      header = false;
      return;
    }
    const auto f = split_csv(line);
    RmseRow r;
    long long level = 0;
    if (f.size() != 6 || !parse_int(f[1], level) || !parse_double(f[2], r.d_rmse))
      throw InputError(where(source, number) + "malformed RMSE row");
    r.mechanism = std::string(trim(f[0]));
    r.level = int(level);
    if (trim(f[3]).empty()) {
      r.q10 = r.q50 = r.q90 = std::nan("");
    } else if (!parse_double(f[3], r.q10) || !parse_double(f[4], r.q50) || !parse_double(f[5], r.q90)) {
      throw InputError(where(source, number) + "malformed RMSE quantiles");
    }
    out.push_back(r);
  });
  return out;
}

}  // namespace hotspots
