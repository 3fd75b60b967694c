#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hotspots/error.hpp"
#include "hotspots/pipeline.hpp"

namespace fs = std::filesystem;
using namespace hotspots;

namespace {

struct Overrides {
  std::string config;
  std::string out;
  std::string stops;
  std::string roads;
  std::optional<std::uint64_t> seed;
  std::optional<int> radius;
  std::optional<std::uint64_t> min_stops;
  std::optional<double> d_cut;
  std::optional<int> k;
  std::optional<double> alpha;
  std::optional<std::size_t> n_runs;
  std::vector<std::string> mechanisms;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "pipeline config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("-o,--out", o.out, "output directory (overrides output_dir)");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
}

PipelineConfig resolve(const Overrides& o) {
  Json j = Json::parse(read_file(o.config));
  if (o.seed) j["master_seed"] = *o.seed;
  PipelineConfig c = pipeline_config_from_json(j, fs::path(o.config).parent_path());
  if (!o.out.empty()) c.output_dir = o.out;
  if (!o.stops.empty()) c.stops = o.stops;
  if (!o.roads.empty()) c.roads = o.roads;
  if (o.radius) c.detection.radius_cells = *o.radius;
  if (o.min_stops) c.detection.min_stops = *o.min_stops;
  if (o.d_cut) c.simulation.params.d_cut = *o.d_cut;
  if (o.k) c.simulation.params.k = *o.k;
  if (o.alpha) c.simulation.params.alpha = *o.alpha;
  if (o.n_runs) {
    c.metrics.n_runs = *o.n_runs;
    c.simulation.n_sims = *o.n_runs;
  }
  if (!o.mechanisms.empty()) {
    c.simulation.mechanisms.clear();
    for (const auto& m : o.mechanisms) c.simulation.mechanisms.push_back(parse_mechanism(m));
  }
  if (o.threads) c.threads = *o.threads;
  c.sync();
  return c;
}

void report(const StageResult& r) {
  std::cout << r.stage << ":";
  for (const auto& f : r.outputs) std::cout << " " << f;
  std::cout << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local hotspot detection, level classification, arrangement metrics and cascade simulation"};
  app.require_subcommand(1);
  Overrides o;

  auto* synth = app.add_subcommand("synth", "generate a synthetic city with planted hotspots");
  std::string spec_file;
  std::uint64_t synth_seed = 0;
  synth->add_option("--spec", spec_file, "synthetic city spec (JSON); defaults apply to missing fields")
      ->check(CLI::ExistingFile);
  synth->add_option("-o,--out", o.out, "output directory")->required();
  synth->add_option("--seed", synth_seed, "seed for the city and the generated config")->required();

  auto* detect = app.add_subcommand("detect", "detect local hotspots from stops");
  add_common(detect, o);
  detect->add_option("--stops", o.stops, "stops CSV (lon,lat)");
  detect->add_option("--roads", o.roads, "roads GeoJSON or row,col CSV");
  detect->add_option("--radius", o.radius, "neighborhood radius in cells (default: elbow selection)");
  detect->add_option("--min-stops", o.min_stops, "popularity threshold (default: head/tail breaks)");

  auto* classify = app.add_subcommand("classify", "assign Loubar popularity levels");
  add_common(classify, o);

  auto* metrics = app.add_subcommand("metrics", "arrangement metrics against null models");
  add_common(metrics, o);
  metrics->add_option("--n-runs", o.n_runs, "null-model repetitions");

  auto* simulate = app.add_subcommand("simulate", "cascade simulation and mechanism comparison");
  add_common(simulate, o);
  simulate->add_option("--mechanism", o.mechanisms, "knn, global or random (repeatable)")->delimiter(',');
  simulate->add_option("--k", o.k, "nearest higher-level hotspots (knn)");
  simulate->add_option("--alpha", o.alpha, "distance-decay exponent");
  simulate->add_option("--d-cut", o.d_cut, "attraction cutoff distance (m)");
  simulate->add_option("--n-runs", o.n_runs, "simulation repetitions");

  auto* rep = app.add_subcommand("report", "render SVG figures from metrics and simulation outputs");
  add_common(rep, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : int(ExitCode::InputError);
  }

  try {
    StageResult r;
    if (synth->parsed()) {
      SyntheticCitySpec spec;
      if (!spec_file.empty()) spec = synth_spec_from_json(Json::parse(read_file(spec_file)));
      spec.seed = synth_seed;
      r = run_synth(spec, o.out, synth_seed);
    } else {
      const PipelineConfig c = resolve(o);
      if (detect->parsed()) r = run_detect(c);
      else if (classify->parsed()) r = run_classify(c);
      else if (metrics->parsed()) r = run_metrics(c);
      else if (simulate->parsed()) r = run_simulate(c);
      else r = run_report(c);
    }
    report(r);
    if (r.exit_code != 0) std::cerr << "warning: " << r.stage << " finished with partial results\n";
    return r.exit_code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return int(e.code());
  } catch (const Json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return int(ExitCode::InputError);
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return int(ExitCode::InputError);
  }
}
