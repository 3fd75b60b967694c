#include "hotspots/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <iostream>
#include <map>

#include "hotspots/error.hpp"
#include "hotspots/levels.hpp"
#include "hotspots/svg.hpp"

namespace hotspots {

namespace fs = std::filesystem;

namespace {

constexpr const char* kHotspots = "hotspots.jsonl";
constexpr const char* kClassified = "hotspots_classified.jsonl";
constexpr const char* kReport = "pattern_report.json";

std::vector<double> number_list(const Json& j, const char* what) {
  if (j.is_array()) return j.get<std::vector<double>>();
  if (j.is_object()) {
    const double start = j.at("start").get<double>(), stop = j.at("stop").get<double>(), step = j.at("step").get<double>();
    if (!(step > 0.0)) throw InputError(std::string(what) + ": step must be positive");
    std::vector<double> out;
    for (std::size_t i = 0;; ++i) {
      const double v = start + double(i) * step;
      if (v > stop + 1e-9 * step) break;
      out.push_back(v);
    }
    return out;
  }
  throw InputError(std::string(what) + ": expected a list or {start, stop, step}");
}

class Stage {
 public:
  Stage(std::string name, const fs::path& dir) : dir_(dir), start_(std::chrono::steady_clock::now()) {
    result_.stage = std::move(name);
    fs::create_directories(dir_);
  }

  void write(const std::string& name, const std::string& content) {
    write_file(dir_ / name, content);
    outputs_[name] = fnv1a_hex(content);
    result_.outputs.push_back(name);
  }

  void input(const std::string& key, const fs::path& path) {
    inputs_[key] = {{"file", path.filename().string()}, {"fnv1a", file_digest(path)}};
  }

  /// Reads the manifest of an earlier stage and checks it against `c`.
  Json require(const std::string& stage, const PipelineConfig& c) {
    const fs::path path = dir_ / ("manifest_" + stage + ".json");
    if (!fs::exists(path))
      throw PreconditionError("missing " + path.filename().string() + "; run '" + stage + "' first");
    const Json m = Json::parse(read_file(path));
    if (!(grid_from_json(m.at("grid")) == c.grid))
      throw PreconditionError("manifest mismatch: grid spec differs from the one used by '" + stage + "'");
    for (const auto& [name, digest] : m.at("outputs").items()) {
      const fs::path out = dir_ / name;
      if (!fs::exists(out) || file_digest(out) != digest.get<std::string>())
        throw PreconditionError("manifest mismatch: " + name + " changed since '" + stage + "' wrote it");
    }
    // upstream manifests must be the ones this stage was built from
    for (const auto& [key, rec] : m.at("inputs").items()) {
      if (key.rfind("manifest_", 0) != 0) continue;
      const fs::path up = dir_ / rec.at("file").get<std::string>();
      if (!fs::exists(up) || file_digest(up) != rec.at("fnv1a").get<std::string>())
        throw PreconditionError("manifest mismatch: " + up.filename().string() + " changed after '" + stage +
                                "' ran; re-run '" + stage + "'");
    }
    inputs_["manifest_" + stage] = {{"file", path.filename().string()}, {"fnv1a", file_digest(path)}};
    return m;
  }

  StageResult finish(const PipelineConfig* c, Json counts, int exit_code = 0) {
    Json m{{"stage", result_.stage}};
    if (c) {
      m["grid"] = to_json(c->grid);
      m["config"] = config_echo(*c);
    }
    m["inputs"] = inputs_;
    m["outputs"] = outputs_;
    m["counts"] = std::move(counts);
    m["exit_code"] = exit_code;
    write_file(dir_ / ("manifest_" + result_.stage + ".json"), m.dump(2) + "\n");
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    write_file(dir_ / ("timing_" + result_.stage + ".txt"), "elapsed_seconds " + format_number(secs) + "\n");
    result_.exit_code = exit_code;
    return result_;
  }

 private:
  fs::path dir_;
  std::chrono::steady_clock::time_point start_;
  StageResult result_;
  Json inputs_ = Json::object();
  Json outputs_ = Json::object();
};

void require_file(const fs::path& p, const char* what) {
  if (p.empty()) throw InputError(std::string("config: '") + what + "' is not set");
  if (!fs::exists(p)) throw InputError(std::string("config: ") + what + " file not found: " + p.string());
}

// The roads used downstream must be the file detection ran with.
void require_same_roads(const PipelineConfig& c) {
  const fs::path path = c.output_dir / "manifest_detect.json";
  if (!fs::exists(path)) throw PreconditionError("missing manifest_detect.json; run 'detect' first");
  const Json m = Json::parse(read_file(path));
  if (m.at("inputs").at("roads").at("fnv1a").get<std::string>() != file_digest(c.roads))
    throw PreconditionError("manifest mismatch: roads file differs from the one used by 'detect'");
}

std::vector<Hotspot> read_hotspots(const fs::path& p) { return parse_hotspots_jsonl(read_file(p), p.filename().string()); }

}  // namespace

void PipelineConfig::sync() {
  metrics.master_seed = master_seed;
  metrics.threads = threads;
  simulation.master_seed = master_seed;
  simulation.threads = threads;
}

PipelineConfig pipeline_config_from_json(const Json& j, const fs::path& base_dir) {
  PipelineConfig c;
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base_dir / p; };
  try {
    if (!j.contains("master_seed") || !j.at("master_seed").is_number_integer())
      throw InputError("config: master_seed is mandatory and must be an integer");
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
    c.grid = grid_from_json(j.at("grid"));
    if (j.contains("stops")) c.stops = resolve(j.at("stops").get<std::string>());
    if (j.contains("roads")) c.roads = resolve(j.at("roads").get<std::string>());
    c.road_buffer_cells = j.value("road_buffer_cells", 0);
    c.threads = j.value("threads", 1u);
    if (j.contains("output_dir")) c.output_dir = resolve(j.at("output_dir").get<std::string>());

    if (j.contains("detection")) {
      const auto& d = j.at("detection");
      if (d.contains("radius_cells") && !d.at("radius_cells").is_null())
        c.detection.radius_cells = d.at("radius_cells").get<int>();
      c.detection.radius_search.lo = d.value("radius_min", c.detection.radius_search.lo);
      c.detection.radius_search.hi = d.value("radius_max", c.detection.radius_search.hi);
      if (d.contains("min_stops")) {
        const auto& m = d.at("min_stops");
        if (m.is_string()) {
          if (m.get<std::string>() != "auto") throw InputError("config: min_stops must be a number or \"auto\"");
        } else if (!m.is_null()) {
          c.detection.min_stops = m.get<std::uint64_t>();
        }
      }
      c.detection.gravity.exponent = d.value("gravity_exponent", c.detection.gravity.exponent);
      const std::string mass = d.value("gravity_mass", std::string("center"));
      if (mass == "center") c.detection.gravity.mass = GravityMass::CenterCount;
      else if (mass == "neighborhood") c.detection.gravity.mass = GravityMass::NeighborhoodStops;
      else throw InputError("config: gravity_mass must be \"center\" or \"neighborhood\"");
    }
    if (j.contains("classification")) {
      const auto& k = j.at("classification");
      if (k.contains("levels_kept") && !k.at("levels_kept").is_null()) c.levels_kept = k.at("levels_kept").get<int>();
    }
    if (j.contains("metrics")) {
      const auto& m = j.at("metrics");
      c.metrics.k_max = m.value("k_max", c.metrics.k_max);
      if (m.contains("r_grid")) c.metrics.r_grid = number_list(m.at("r_grid"), "r_grid");
      if (m.contains("d_count")) c.metrics.d_counts = number_list(m.at("d_count"), "d_count");
      c.metrics.n_runs = m.value("n_runs", c.metrics.n_runs);
    }
    if (j.contains("simulation")) {
      const auto& s = j.at("simulation");
      if (s.contains("mechanisms")) {
        c.simulation.mechanisms.clear();
        for (const auto& name : s.at("mechanisms")) c.simulation.mechanisms.push_back(parse_mechanism(name.get<std::string>()));
      }
      c.simulation.params.k = s.value("k", c.simulation.params.k);
      c.simulation.params.alpha = s.value("alpha", c.simulation.params.alpha);
      c.simulation.params.d_cut = s.value("d_cut", c.simulation.params.d_cut);
      c.simulation.params.x_radius_cells = s.value("x_radius_cells", c.simulation.params.x_radius_cells);
      c.simulation.n_sims = s.value("n_sims", c.simulation.n_sims);
      if (s.contains("d_rmse")) c.simulation.d_rmse = number_list(s.at("d_rmse"), "d_rmse");
    }
  } catch (const Json::exception& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  if (c.levels_kept && *c.levels_kept < 2) throw InputError("config: levels_kept must be at least 2");
  c.sync();
  return c;
}

PipelineConfig load_pipeline_config(const fs::path& file) {
  Json j;
  try {
    j = Json::parse(read_file(file));
  } catch (const Json::parse_error& e) {
    throw InputError(file.filename().string() + ": invalid JSON (" + e.what() + ")");
  }
  return pipeline_config_from_json(j, file.parent_path());
}

Json config_echo(const PipelineConfig& c) {
  const auto& d = c.detection;
  Json mechanisms = Json::array();
  for (const auto m : c.simulation.mechanisms) mechanisms.push_back(to_string(m));
  return {{"master_seed", c.master_seed},
          {"grid", to_json(c.grid)},
          {"stops", c.stops.filename().string()},
          {"roads", c.roads.filename().string()},
          {"road_buffer_cells", c.road_buffer_cells},
          {"detection",
           {{"radius_cells", d.radius_cells ? Json(*d.radius_cells) : Json(nullptr)},
            {"radius_min", d.radius_search.lo},
            {"radius_max", d.radius_search.hi},
            {"min_stops", d.min_stops ? Json(*d.min_stops) : Json("auto")},
            {"gravity_exponent", d.gravity.exponent},
            {"gravity_mass", d.gravity.mass == GravityMass::CenterCount ? "center" : "neighborhood"}}},
          {"classification", {{"levels_kept", c.levels_kept ? Json(*c.levels_kept) : Json(nullptr)}}},
          {"metrics",
           {{"k_max", c.metrics.k_max},
            {"r_grid", c.metrics.r_grid},
            {"d_count", c.metrics.d_counts},
            {"n_runs", c.metrics.n_runs}}},
          {"simulation",
           {{"mechanisms", mechanisms},
            {"k", c.simulation.params.k},
            {"alpha", c.simulation.params.alpha},
            {"d_cut", c.simulation.params.d_cut},
            {"x_radius_cells", c.simulation.params.x_radius_cells},
            {"n_sims", c.simulation.n_sims},
            {"d_rmse", c.simulation.d_rmse}}}};
}

std::vector<CellPointSet> levels_of(const std::vector<Hotspot>& classified, std::optional<int> levels_kept) {
  std::map<int, std::vector<Cell>> grouped;
  for (const auto& h : classified) {
    if (!h.level) throw PreconditionError("hotspot " + std::to_string(h.id) + " has no level; run 'classify' first");
    grouped[*h.level].push_back(h.center);
  }
  std::vector<CellPointSet> out;
  for (auto& [level, cells] : grouped) {
    if (levels_kept && int(out.size()) == *levels_kept) break;
    std::sort(cells.begin(), cells.end());
    out.emplace_back(std::move(cells));
  }
  return out;
}

StageResult run_synth(const SyntheticCitySpec& spec, const fs::path& out_dir, std::uint64_t master_seed) {
  const SyntheticCity city = synth_city(spec);  // throws before anything is written
  Stage st("synth", out_dir);
  st.write("stops.csv", stops_csv(city.stops));
  st.write("roads.geojson", roads_geojson(city.road_lines));
  st.write("truth.json", truth_json(city).dump(2) + "\n");
  // half the smallest planted hotspot keeps every planted center while
  // rejecting the stray maxima that scatter and noise produce
  std::uint64_t min_planted = 0;
  for (const auto& h : city.truth)
    if (min_planted == 0 || h.stops < min_planted) min_planted = h.stops;
  const Json cfg{{"master_seed", master_seed},
                 {"grid", to_json(city.grid)},
                 {"stops", "stops.csv"},
                 {"roads", "roads.geojson"},
                 {"road_buffer_cells", 0},
                 {"output_dir", "."},
                 {"detection", {{"radius_cells", nullptr}, {"min_stops", std::max<std::uint64_t>(1, min_planted / 2)}}}};
  st.write("config.json", cfg.dump(2) + "\n");
  return st.finish(nullptr, {{"spec", to_json(spec)},
                             {"stops", city.stops.size()},
                             {"planted", city.truth.size()},
                             {"inhibited_children", city.inhibited}});
}

StageResult run_detect(const PipelineConfig& c) {
  require_file(c.stops, "stops");
  require_file(c.roads, "roads");
  Stage st("detect", c.output_dir);
  st.input("stops", c.stops);
  st.input("roads", c.roads);
  const auto stops = read_stops_csv(c.stops);
  if (stops.empty()) std::cerr << "warning: stops file is empty\n";
  const RoadMask road = load_roads(c.roads, c.grid, c.road_buffer_cells);
  const BinResult bins = bin_points(stops, c.grid);
  if (bins.out_of_bounds > 0)
    std::cerr << "warning: " << bins.out_of_bounds << " of " << stops.size()
              << " stops fall outside the grid extent and were not binned\n";

  DetectionResult res;
  if (bins.raster.total() > 0) res = detect(bins.raster, &road, c.detection);
  st.write(kHotspots, hotspots_jsonl(res.hotspots, c.grid));
  st.write("hotspots.csv", hotspots_csv(res.hotspots, c.grid));
  if (res.elbow) st.write("elbow.csv", elbow_csv(*res.elbow));
  return st.finish(&c, {{"stops", stops.size()},
                        {"out_of_bounds", bins.out_of_bounds},
                        {"road_cells", road.cells().size()},
                        {"radius_cells", res.radius_cells},
                        {"min_stops", res.min_stops},
                        {"preliminary_hotspots", res.preliminary_count},
                        {"hotspots", res.hotspots.size()}});
}

StageResult run_classify(const PipelineConfig& c) {
  Stage st("classify", c.output_dir);
  st.require("detect", c);
  auto hs = read_hotspots(c.output_dir / kHotspots);
  if (hs.empty()) throw PreconditionError("classify: no hotspots to classify");
  const LevelPartition part = classify_levels(hs);
  assign_levels(hs, part);
  st.write(kClassified, hotspots_jsonl(hs, c.grid));
  st.write("hotspots_classified.csv", hotspots_csv(hs, c.grid));
  st.write("levels.csv", level_table_csv(summarize_levels(hs, part)));
  Json per_level = Json::array();
  for (const auto& l : part.levels) per_level.push_back(l.size());
  return st.finish(&c, {{"hotspots", hs.size()}, {"levels", part.levels.size()}, {"per_level", per_level}});
}

StageResult run_metrics(const PipelineConfig& c) {
  require_file(c.roads, "roads");
  Stage st("metrics", c.output_dir);
  st.require("classify", c);
  require_same_roads(c);
  st.input("roads", c.roads);
  const auto levels = levels_of(read_hotspots(c.output_dir / kClassified), c.levels_kept);
  if (levels.size() < 2)
    throw PreconditionError("metrics: needs at least 2 popularity levels, found " + std::to_string(levels.size()));
  const RoadMask road = load_roads(c.roads, c.grid, c.road_buffer_cells);
  const PatternReport rep = pattern_report(levels, road, c.metrics);
  st.write(kReport, to_json(rep).dump(1) + "\n");
  for (const auto& [stem, csv] : pattern_report_csvs(rep)) st.write("curves/" + stem + ".csv", csv);
  return st.finish(&c, {{"levels", levels.size()}, {"pairs", rep.pairs.size()}, {"n_runs", c.metrics.n_runs}});
}

StageResult run_simulate(const PipelineConfig& c) {
  require_file(c.roads, "roads");
  Stage st("simulate", c.output_dir);
  st.require("classify", c);
  require_same_roads(c);
  st.input("roads", c.roads);
  const auto levels = levels_of(read_hotspots(c.output_dir / kClassified), c.levels_kept);
  if (levels.size() < 2)
    throw PreconditionError("simulate: needs at least 2 popularity levels, found " + std::to_string(levels.size()));
  const RoadMask road = load_roads(c.roads, c.grid, c.road_buffer_cells);
  const auto results = mechanism_experiment(levels, road, c.simulation);
  Json counts = Json::object();
  bool partial = false;
  for (const auto& r : results) {
    const std::string name = to_string(r.mechanism);
    st.write("rmse_" + name + ".csv", rmse_csv(r));
    if (r.first_run) st.write("simulation_" + name + ".json", to_json(*r.first_run).dump(1) + "\n");
    counts[name] = {{"complete_runs", r.complete_runs}, {"partial_runs", r.partial_runs}};
    partial = partial || r.partial_runs > 0;
  }
  return st.finish(&c, counts, partial ? int(ExitCode::Exhaustion) : 0);
}

StageResult run_report(const PipelineConfig& c) {
  Stage st("report", c.output_dir);
  std::size_t figures = 0;
  if (fs::exists(c.output_dir / "manifest_metrics.json")) {
    st.require("metrics", c);
    const auto rep = pattern_report_from_json(Json::parse(read_file(c.output_dir / kReport)));
    for (const auto& [stem, svg] : pattern_report_svgs(rep)) {
      st.write("figures/" + stem + ".svg", svg);
      ++figures;
    }
  }
  if (fs::exists(c.output_dir / "manifest_simulate.json")) {
    const Json m = st.require("simulate", c);
    std::vector<RmseSeries> series;
    for (const auto& [name, digest] : m.at("outputs").items()) {
      if (name.rfind("rmse_", 0) != 0) continue;
      std::map<int, RmseSeries> by_level;
      for (const auto& row : parse_rmse_csv(read_file(c.output_dir / name), name)) {
        auto& s = by_level[row.level];
        s.mechanism = row.mechanism;
        s.level = row.level;
        s.d_rmse.push_back(row.d_rmse);
        if (!std::isnan(row.q50)) {
          s.band.q10.push_back(row.q10);
          s.band.q50.push_back(row.q50);
          s.band.q90.push_back(row.q90);
          s.band.n_runs = 1;
        }
      }
      for (auto& [level, s] : by_level) series.push_back(std::move(s));
    }
    for (const auto& [stem, svg] : rmse_svgs(series)) {
      st.write("figures/" + stem + ".svg", svg);
      ++figures;
    }
  }
  if (figures == 0) throw PreconditionError("report: nothing to draw; run 'metrics' or 'simulate' first");
  return st.finish(&c, {{"figures", figures}});
}

}  // namespace hotspots
