#include "hotspots/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <iterator>

#include "hotspots/error.hpp"
#include "hotspots/parallel.hpp"
#include "hotspots/random.hpp"
#include "hotspots/weighted_sampler.hpp"

namespace hotspots {

namespace {

Point center_of(Cell c, double cell_size) { return {(c.col + 0.5) * cell_size, (c.row + 0.5) * cell_size}; }

double decay(double d, double alpha) { return alpha == 1.0 ? 1.0 / d : std::pow(d, -alpha); }

std::vector<Cell> merge_sets(const CellPointSet& a, const CellPointSet& b) {
  std::vector<Cell> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

const char* to_string(Mechanism m) {
  switch (m) {
    case Mechanism::Knn:
      return "knn";
    case Mechanism::Global:
      return "global";
    case Mechanism::Random:
      return "random";
  }
  return "unknown";
}

Mechanism parse_mechanism(const std::string& name) {
  if (name == "knn") return Mechanism::Knn;
  if (name == "global") return Mechanism::Global;
  if (name == "random") return Mechanism::Random;
  throw InputError("unknown mechanism '" + name + "' (expected knn, global or random)");
}

void MechanismParams::validate() const {
  if (k < 1) throw PreconditionError("mechanism: K must be positive");
  if (!(alpha > 0.0)) throw PreconditionError("mechanism: alpha must be positive");
  if (!(d_cut > 0.0)) throw PreconditionError("mechanism: d_cut must be positive");
  if (x_radius_cells < 0) throw PreconditionError("mechanism: x_radius must be >= 0");
}

double attraction(Point x, const PointIndex& higher, const MechanismParams& params) {
  if (higher.empty()) throw PreconditionError("attraction: higher-level set is empty");
  switch (params.mechanism) {
    case Mechanism::Knn: {
      double sum = 0.0;
      for (const auto& n : higher.nearest(x, std::size_t(params.k), params.d_cut)) {
        if (n.distance == 0.0) throw SingularDistanceError("attraction: location coincides with a hotspot");
        sum += decay(n.distance, params.alpha);
      }
      return sum;
    }
    case Mechanism::Global: {
      double sum = 0.0;
      bool singular = false;
      higher.for_each_within_closed(x, params.d_cut, [&](std::size_t, double d) {
        if (d == 0.0) singular = true;
        else sum += decay(d, params.alpha);
      });
      if (singular) throw SingularDistanceError("attraction: location coincides with a hotspot");
      return sum;
    }
    case Mechanism::Random: {
      const auto nn = higher.nearest(x, 1, params.d_cut);
      if (!nn.empty() && nn.front().distance == 0.0)
        throw SingularDistanceError("attraction: location coincides with a hotspot");
      return nn.empty() ? 0.0 : 1.0;
    }
  }
  return 0.0;
}

double attraction(Cell x, const CellPointSet& higher, const MechanismParams& params, double cell_size) {
  return attraction(center_of(x, cell_size), PointIndex(higher, cell_size), params);
}

std::vector<CellPointSet> background_split(std::span<const CellPointSet> observed, double d_cut, double cell_size) {
  std::vector<CellPointSet> out;
  if (observed.empty()) return out;
  out.push_back(observed[0]);
  std::vector<Cell> reach(observed[0].begin(), observed[0].end());
  for (std::size_t i = 1; i < observed.size(); ++i) {
    std::sort(reach.begin(), reach.end());
    reach.erase(std::unique(reach.begin(), reach.end()), reach.end());
    const PointIndex index(CellPointSet(reach), cell_size);
    std::vector<Cell> kept;
    for (const Cell c : observed[i])
      if (index.nearest_distance(center_of(c, cell_size)) > d_cut) kept.push_back(c);
    reach.insert(reach.end(), kept.begin(), kept.end());
    out.emplace_back(std::move(kept));
  }
  return out;
}

CandidatePool::CandidatePool(const GridSpec& grid, std::span<const Cell> cells)
    : grid_(grid), all_(cells.begin(), cells.end()), alive_(grid.cell_count(), 0) {
  std::sort(all_.begin(), all_.end());
  all_.erase(std::unique(all_.begin(), all_.end()), all_.end());
  for (const Cell c : all_) {
    if (!grid_.contains(c)) throw InputError("candidate cell outside grid");
    alive_[grid_.linear(c)] = 1;
  }
  alive_count_ = all_.size();
}

void CandidatePool::remove(Cell c) {
  if (!contains(c)) return;
  alive_[grid_.linear(c)] = 0;
  --alive_count_;
}

void CandidatePool::remove_square(Cell center, int radius) {
  for (std::int32_t r = center.row - radius; r <= center.row + radius; ++r)
    for (std::int32_t c = center.col - radius; c <= center.col + radius; ++c) remove({r, c});
}

std::vector<Cell> CandidatePool::cells() const {
  std::vector<Cell> out;
  out.reserve(alive_count_);
  for (const Cell c : all_)
    if (alive_[grid_.linear(c)]) out.push_back(c);
  return out;
}

CellPointSet simulate_level(const CellPointSet& higher, CandidatePool& pool, std::size_t n,
                            const MechanismParams& params, std::uint64_t seed) {
  params.validate();
  if (n == 0) return {};
  for (const Cell h : higher)
    if (pool.contains(h)) throw PreconditionError("simulate_level: candidates overlap the higher-level set");
  const double cs = pool.grid().cell_size;

  const std::vector<Cell> cand = pool.cells();
  if (cand.empty()) throw ExhaustionError(0, n);
  if (higher.empty()) throw ZeroAttractionError(0, n);

  // attraction depends only on the higher-level set, so it is computed once
  const PointIndex index(higher, cs);
  std::vector<double> weights(cand.size());
  for (std::size_t i = 0; i < cand.size(); ++i) weights[i] = attraction(center_of(cand[i], cs), index, params);
  WeightedSampler sampler(std::move(weights));

  Rng rng(seed);
  std::vector<Cell> picks;
  picks.reserve(n);
  while (picks.size() < n) {
    if (pool.size() == 0) throw ExhaustionError(picks.size(), n);
    if (sampler.positive_count() == 0) throw ZeroAttractionError(picks.size(), n);
    const Cell p = cand[sampler.sample(rng)];
    picks.push_back(p);
    const int rad = params.x_radius_cells;
    for (std::int32_t r = p.row - rad; r <= p.row + rad; ++r) {
      for (std::int32_t c = p.col - rad; c <= p.col + rad; ++c) {
        const Cell q{r, c};
        if (!pool.contains(q)) continue;
        pool.remove(q);
        const auto it = std::lower_bound(cand.begin(), cand.end(), q);
        if (it != cand.end() && *it == q) sampler.remove(std::size_t(it - cand.begin()));
      }
    }
  }
  return CellPointSet(std::move(picks));
}

CellPointSet SimulationRun::combined(std::size_t i) const {
  return CellPointSet(merge_sets(levels.at(i).simulated, levels.at(i).background));
}

SimulationRun simulate_cascade(std::span<const CellPointSet> observed, const RoadMask& road,
                               const MechanismParams& params, std::uint64_t seed) {
  params.validate();
  if (observed.empty() || observed[0].empty()) throw PreconditionError("simulate_cascade: level 1 is empty");
  const double cs = road.grid().cell_size;
  const auto background = background_split(observed, params.d_cut, cs);

  SimulationRun run;
  run.seed = seed;
  run.params = params;
  CandidatePool pool(road.grid(), road.cells());
  run.levels.push_back({1, observed[0].size(), background[0], {}, pool.size(), pool.size()});

  CellPointSet higher = background[0];
  for (std::size_t i = 1; i < observed.size(); ++i) {
    LevelRecord rec;
    rec.level = int(i) + 1;
    rec.observed = observed[i].size();
    rec.background = background[i];
    for (const Cell c : background[i - 1]) pool.remove(c);
    // kept hotspots of this level are occupied as well
    for (const Cell c : background[i]) pool.remove(c);
    rec.candidates_before = pool.size();
    const std::size_t n = observed[i].size() - background[i].size();
    try {
      rec.simulated = simulate_level(higher, pool, n, params, derive_seed(seed, i));
    } catch (const SimulationError& e) {
      rec.candidates_after = pool.size();
      run.levels.push_back(std::move(rec));
      run.complete = false;
      run.failed_level = int(i) + 1;
      run.failure = e.what();
      return run;
    }
    rec.candidates_after = pool.size();
    run.levels.push_back(std::move(rec));
    higher = run.combined(i);
  }
  return run;
}

double rmse_compare(const CellPointSet& observed, const CellPointSet& simulated, double d_rmse, double cell_size) {
  if (observed.empty()) throw PreconditionError("rmse_compare: observed set is empty");
  const PointIndex io(observed, cell_size);
  const PointIndex is(simulated, cell_size);
  double sum = 0.0;
  for (const Cell c : observed) {
    const Point x = center_of(c, cell_size);
    const double diff = double(io.count_within(x, d_rmse)) - double(is.count_within(x, d_rmse));
    sum += diff * diff;
  }
  return std::sqrt(sum / double(observed.size()));
}

std::vector<double> default_rmse_grid() { return {250.0, 500.0, 1000.0, 1500.0, 2000.0}; }

std::vector<MechanismResult> mechanism_experiment(std::span<const CellPointSet> observed, const RoadMask& road,
                                                  const ExperimentConfig& config) {
  if (observed.size() < 2) throw PreconditionError("mechanism experiment requires at least 2 levels");
  if (config.n_sims == 0) throw PreconditionError("mechanism experiment: n_sims must be positive");
  const double cs = road.grid().cell_size;
  const std::size_t m = observed.size();

  std::vector<MechanismResult> results;
  for (const Mechanism mech : config.mechanisms) {
    MechanismParams params = config.params;
    params.mechanism = mech;
    std::vector<SimulationRun> runs(config.n_sims);
    parallel_for(config.n_sims, config.threads, [&](std::size_t r) {
      runs[r] = simulate_cascade(observed, road, params, derive_seed(config.master_seed, r));
    });

    MechanismResult res;
    res.mechanism = mech;
    // per level: one rmse vector per complete run
    std::vector<std::vector<std::vector<double>>> samples(m);
    for (const auto& run : runs) {
      if (!run.complete) {
        ++res.partial_runs;
        continue;
      }
      ++res.complete_runs;
      for (std::size_t i = 1; i < m; ++i) {
        const CellPointSet h = run.combined(i);
        std::vector<double> row;
        for (const double d : config.d_rmse) row.push_back(rmse_compare(observed[i], h, d, cs));
        samples[i].push_back(std::move(row));
      }
    }
    if (res.partial_runs > 0)
      std::cerr << "warning: " << res.partial_runs << " partial " << to_string(mech)
                << " runs excluded from the RMSE summary\n";
    for (std::size_t i = 1; i < m; ++i)
      res.levels.push_back({mech, int(i) + 1, config.d_rmse, quantile_band(samples[i])});
    res.first_run = std::move(runs.front());
    results.push_back(std::move(res));
  }
  return results;
}

}  // namespace hotspots
