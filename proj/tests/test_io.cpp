#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "hotspots/error.hpp"
#include "hotspots/io.hpp"
#include "hotspots/pipeline.hpp"
#include "hotspots/svg.hpp"

using namespace hotspots;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("hotspots_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

double attr(const std::string& svg, const std::string& name) {
  const std::regex re(name + "=\"([^\"]+)\"");
  std::smatch m;
  REQUIRE(std::regex_search(svg, m, re));
  return std::stod(m[1]);
}

// Small city that runs through every stage in a few seconds.
SyntheticCitySpec small_city() {
  SyntheticCitySpec s;
  s.grid = {114.2, 30.5, 10.0, 300, 300, 30.5};
  s.street_spacing_cells = 4;
  s.detection_radius_cells = 2;
  s.border_m = 200;
  s.cluster_sizes = {3, 2, 1};
  s.cluster_radius_m = 150;
  s.cluster_separation_m = 900;
  s.level_multipliers = {2, 2};
  s.stops_per_level = {200, 100, 50};
  s.scatter_sigma_m = 20;
  s.seed = 4;
  return s;
}

Json pipeline_json(const fs::path& dir) {
  Json j = Json::parse(read_file(dir / "config.json"));
  j["metrics"] = {{"k_max", 5}, {"r_grid", {{"start", 0}, {"stop", 1000}, {"step", 100}}}, {"n_runs", 5}};
  j["simulation"] = {{"mechanisms", {"knn", "global", "random"}}, {"n_sims", 3}, {"d_rmse", {250, 500}},
                     {"x_radius_cells", 2}};
  return j;
}

PipelineConfig config_from(const Json& j, const fs::path& dir) { return pipeline_config_from_json(j, dir); }

}  // namespace

TEST_CASE("number formatting and digests") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1e21) == "1e+21");
  CHECK(format_number(250.0) == "250");
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("stops CSV") {
  std::istringstream ok("id,LAT,lon\n1,30.5,114.25\n2,30.6,114.3\n");
  const auto pts = parse_stops_csv(ok, "s.csv");
  REQUIRE(pts.size() == 2);
  CHECK(pts[1].lon == 114.3);
  CHECK(pts[1].lat == 30.6);

  std::istringstream bad("lon,lat\n114.2,30.5\n114.2,abc\n");
  try {
    parse_stops_csv(bad, "s.csv");
    FAIL("expected an input error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("s.csv:3") != std::string::npos);
  }
  std::istringstream ragged("lon,lat\n114.2\n");
  CHECK_THROWS_AS(parse_stops_csv(ragged, "s.csv"), InputError);
  std::istringstream no_header("x,y\n1,2\n");
  CHECK_THROWS_AS(parse_stops_csv(no_header, "s.csv"), InputError);
  std::istringstream empty("");
  CHECK(parse_stops_csv(empty, "s.csv").empty());

  const std::vector<GeoPoint> round{{114.123456789, 30.987654321}};
  std::istringstream back(stops_csv(round));
  CHECK(parse_stops_csv(back, "x").front().lon == round[0].lon);
}

TEST_CASE("roads GeoJSON and cell CSV") {
  const std::string fc = R"({"type":"FeatureCollection","features":[
    {"type":"Feature","geometry":{"type":"LineString","coordinates":[[114.0,30.0],[114.01,30.0]]}},
    {"type":"Feature","geometry":{"type":"MultiLineString","coordinates":[[[114.0,30.0],[114.0,30.01]],[[1,2],[3,4]]]}}]})";
  CHECK(parse_roads_geojson(fc, "r").size() == 3);
  CHECK(parse_roads_geojson(R"({"type":"LineString","coordinates":[[0,0],[1,1]]})", "r").size() == 1);
  CHECK_THROWS_AS(parse_roads_geojson(R"({"type":"Polygon","coordinates":[]})", "r"), InputError);
  CHECK_THROWS_AS(parse_roads_geojson("{not json", "r"), InputError);

  const auto lines = parse_roads_geojson(fc, "r");
  CHECK(parse_roads_geojson(roads_geojson(lines), "again").size() == 3);

  const GridSpec g{0, 0, 10, 5, 5, 0};
  std::istringstream cells("row,col\n1,2\n1,2\n4,4\n");
  const RoadMask m = parse_road_cells_csv(cells, g, "c");
  CHECK(m.size() == 2);
  std::istringstream again(road_cells_csv(m));
  CHECK(parse_road_cells_csv(again, g, "c").size() == 2);
  std::istringstream outside("row,col\n5,0\n");
  CHECK_THROWS_AS(parse_road_cells_csv(outside, g, "c"), InputError);
}

TEST_CASE("hotspot JSON lines round trip") {
  const GridSpec g{114, 30, 10, 50, 50, 30};
  std::vector<Hotspot> hs{{0, {3, 4}, {{3, 4}, {3, 5}}, 12, std::nullopt}, {1, {20, 20}, {{20, 20}}, 7, 2}};
  const auto text = hotspots_jsonl(hs, g);
  const auto back = parse_hotspots_jsonl(text, "h");
  REQUIRE(back.size() == 2);
  CHECK(back[0].members == hs[0].members);
  CHECK(!back[0].level);
  CHECK(back[1].level == 2);
  CHECK(back[1].stops == 7);
  CHECK(hotspots_csv(hs, g).rfind("id,center_lon,center_lat,stops,level\n", 0) == 0);
  CHECK_THROWS_AS(parse_hotspots_jsonl("{\"id\":0}\n", "h"), InputError);
}

TEST_CASE("grid spec JSON") {
  const GridSpec g{114.2, 30.5, 10, 800, 700, 30.5};
  CHECK(grid_from_json(to_json(g)) == g);
  Json bad = to_json(g);
  bad["cell_size"] = -1;
  CHECK_THROWS_AS(grid_from_json(bad), InputError);
}

TEST_CASE("SVG band vertices map back to the quantiles") {
  SvgFigure fig;
  fig.title = "t";
  fig.x_label = "radius (m)";
  fig.y_label = "coverage ratio";
  const std::vector<double> x{0, 100, 200, 300};
  const std::vector<double> lo{0.0, 0.1, 0.3, 0.35};
  const std::vector<double> hi{0.05, 0.4, 0.6, 0.9};
  fig.bands.push_back({"random1 10-90%", x, lo, hi, "#cccccc"});
  fig.lines.push_back({"observed", x, {0.0, 0.5, 0.8, 1.0}, false, "#000000"});
  const std::string svg = render_svg(fig);

  const double xmin = attr(svg, "data-x-min"), xmax = attr(svg, "data-x-max");
  const double ymin = attr(svg, "data-y-min"), ymax = attr(svg, "data-y-max");
  const double left = attr(svg, "data-left"), top = attr(svg, "data-top");
  const double w = attr(svg, "data-plot-width"), h = attr(svg, "data-plot-height");

  std::smatch m;
  REQUIRE(std::regex_search(svg, m, std::regex("<polygon class=\"band\"[^>]*points=\"([^\"]+)\"")));
  std::istringstream pts(m[1].str());
  std::vector<std::pair<double, double>> verts;
  std::string pair;
  while (pts >> pair) {
    const auto comma = pair.find(',');
    const double px = std::stod(pair.substr(0, comma)), py = std::stod(pair.substr(comma + 1));
    verts.emplace_back(xmin + (px - left) / w * (xmax - xmin), ymax - (py - top) / h * (ymax - ymin));
  }
  REQUIRE(verts.size() == 8);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(verts[i].first == doctest::Approx(x[i]).epsilon(1e-3));
    CHECK(verts[i].second == doctest::Approx(hi[i]).epsilon(1e-3));
    CHECK(verts[7 - i].first == doctest::Approx(x[i]).epsilon(1e-3));
    CHECK(verts[7 - i].second == doctest::Approx(lo[i]).epsilon(1e-3));
  }
  CHECK(svg.find("radius (m)") != std::string::npos);
  CHECK(svg.find("<image") == std::string::npos);
}

TEST_CASE("SVG edge cases") {
  SvgFigure fig;
  fig.lines.push_back({"single", {5.0}, {2.0}});
  const std::string svg = render_svg(fig);
  CHECK(svg.find("<circle class=\"point\"") != std::string::npos);
  CHECK(svg.find("single") != std::string::npos);

  SvgFigure empty;
  empty.lines.push_back({"observed knn", {}, {}});
  try {
    render_svg(empty);
    FAIL("expected an input error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("observed knn") != std::string::npos);
  }
  SvgFigure ragged;
  ragged.bands.push_back({"b", {1, 2}, {0}, {1, 2}});
  CHECK_THROWS_AS(render_svg(ragged), InputError);
}

TEST_CASE("pipeline config") {
  Json j{{"master_seed", 3}, {"grid", to_json(GridSpec{0, 0, 10, 10, 10, 0})}};
  const auto c = config_from(j, ".");
  CHECK(c.master_seed == 3);
  CHECK(!c.detection.radius_cells);

  j.erase("master_seed");
  CHECK_THROWS_AS(config_from(j, "."), InputError);
  j["master_seed"] = "7";
  CHECK_THROWS_AS(config_from(j, "."), InputError);
  j["master_seed"] = 7;
  j["detection"] = {{"min_stops", "often"}};
  CHECK_THROWS_AS(config_from(j, "."), InputError);
  j["detection"] = {{"min_stops", 4}, {"radius_cells", 3}};
  j["metrics"] = {{"r_grid", {{"start", 0}, {"stop", 200}, {"step", 50}}}};
  const auto d = config_from(j, ".");
  CHECK(d.detection.min_stops == 4u);
  CHECK(d.metrics.r_grid == std::vector<double>{0, 50, 100, 150, 200});
  CHECK_THROWS_AS(load_pipeline_config("/nonexistent/config.json"), InputError);
}

TEST_CASE("synthetic city generator") {
  const SyntheticCitySpec spec = small_city();
  const SyntheticCity a = synth_city(spec);
  const SyntheticCity b = synth_city(spec);
  REQUIRE(!a.truth.empty());
  CHECK(a.stops.size() == b.stops.size());
  CHECK(stops_csv(a.stops) == stops_csv(b.stops));

  const int gap = 3 * spec.detection_radius_cells;
  for (std::size_t i = 0; i < a.truth.size(); ++i) {
    CHECK(a.roads.contains(a.truth[i].center));
    for (std::size_t k = i + 1; k < a.truth.size(); ++k) {
      const Cell p = a.truth[i].center, q = a.truth[k].center;
      CHECK(std::max(std::abs(p.row - q.row), std::abs(p.col - q.col)) > gap);
    }
  }
  const auto levels = a.levels();
  REQUIRE(levels.size() == 3);
  CHECK(levels[0].size() == 6);
  CHECK(levels[1].size() == 12);
  CHECK(levels[2].size() == 24);

  CHECK(synth_spec_from_json(to_json(spec)).cluster_sizes == spec.cluster_sizes);
  SyntheticCitySpec crowded = spec;
  crowded.cluster_sizes.assign(40, 1);
  crowded.cluster_separation_m = 2000;
  CHECK_THROWS_AS(synth_city(crowded), PreconditionError);
}

TEST_CASE("uniform placement spreads lower levels over the roads") {
  SyntheticCitySpec spec = small_city();
  spec.placement = Placement::Uniform;
  spec.cluster_sizes = {1};
  spec.level_multipliers = {60};
  spec.stops_per_level = {50, 20};
  const auto city = synth_city(spec);
  const auto levels = city.levels();
  REQUIRE(levels.size() == 2);
  // a flat attraction puts children in all four quadrants of the city
  std::set<int> quadrants;
  for (const Cell c : levels[1]) quadrants.insert((c.row >= 150) * 2 + (c.col >= 150));
  CHECK(quadrants.size() == 4);
}

TEST_CASE("pipeline stages end to end") {
  TempDir tmp("pipeline");
  const auto synth = run_synth(small_city(), tmp.path, 11);
  CHECK(synth.outputs.size() == 4);
  const Json j = pipeline_json(tmp.path);
  const PipelineConfig c = config_from(j, tmp.path);

  CHECK(run_detect(c).exit_code == 0);
  const auto truth = Json::parse(read_file(tmp.path / "truth.json"));
  std::set<std::pair<int, int>> planted, found;
  for (const auto& t : truth.at("centers")) planted.insert({t.at("row").get<int>(), t.at("col").get<int>()});
  for (const auto& h : parse_hotspots_jsonl(read_file(tmp.path / "hotspots.jsonl"), "h"))
    found.insert({h.center.row, h.center.col});
  CHECK(found == planted);

  run_classify(c);
  run_metrics(c);
  const auto sim = run_simulate(c);
  for (const char* f : {"rmse_knn.csv", "rmse_global.csv", "rmse_random.csv"}) CHECK(fs::exists(tmp.path / f));
  CHECK(sim.exit_code == 0);
  run_report(c);
  CHECK(fs::exists(tmp.path / "figures" / "knn_L1_L2.svg"));
  CHECK(fs::exists(tmp.path / "figures" / "rmse_L2.svg"));

  SUBCASE("a changed grid is rejected downstream") {
    Json other = j;
    other["grid"]["cell_size"] = 12.0;
    try {
      run_classify(config_from(other, tmp.path));
      FAIL("expected a manifest mismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ExitCode::PreconditionError);
      CHECK(std::string(e.what()).find("manifest mismatch") != std::string::npos);
    }
  }
  SUBCASE("an edited upstream output is rejected") {
    write_file(tmp.path / "hotspots_classified.jsonl", "");
    CHECK_THROWS_AS(run_metrics(c), PreconditionError);
  }
  SUBCASE("re-running a stage is idempotent") {
    const std::string before = read_file(tmp.path / "pattern_report.json");
    run_metrics(c);
    CHECK(read_file(tmp.path / "pattern_report.json") == before);
  }
}

TEST_CASE("metrics need two levels") {
  TempDir tmp("single_level");
  SyntheticCitySpec spec = small_city();
  spec.level_multipliers = {};
  spec.stops_per_level = {100};
  run_synth(spec, tmp.path, 2);
  const PipelineConfig c = config_from(pipeline_json(tmp.path), tmp.path);
  run_detect(c);
  run_classify(c);
  try {
    run_metrics(c);
    FAIL("expected a precondition error");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("at least 2") != std::string::npos);
  }
}

TEST_CASE("empty stops give an empty hotspot file") {
  TempDir tmp("empty");
  write_file(tmp.path / "stops.csv", "lon,lat\n");
  write_file(tmp.path / "roads.csv", "row,col\n1,1\n");
  Json j{{"master_seed", 1}, {"grid", to_json(GridSpec{114, 30, 10, 20, 20, 30})}, {"stops", "stops.csv"},
         {"roads", "roads.csv"}, {"output_dir", "."}};
  const auto r = run_detect(config_from(j, tmp.path));
  CHECK(r.exit_code == 0);
  CHECK(read_file(tmp.path / "hotspots.jsonl").empty());
}
