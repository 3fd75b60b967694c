#include "hotspots/metrics.hpp"

#include <algorithm>
#include <map>

#include "hotspots/error.hpp"
#include "hotspots/parallel.hpp"
#include "hotspots/point_index.hpp"
#include "hotspots/random.hpp"

namespace hotspots {

namespace {

std::vector<double> nearest_to_set(const CellPointSet& from, const CellPointSet& to, double cell_size) {
  const PointIndex index(to, cell_size);
  std::vector<double> out;
  out.reserve(from.size());
  for (const Cell c : from) out.push_back(index.nearest_distance({(c.col + 0.5) * cell_size, (c.row + 0.5) * cell_size}));
  return out;
}

Point center_of(Cell c, double cell_size) { return {(c.col + 0.5) * cell_size, (c.row + 0.5) * cell_size}; }

}  // namespace

double mean_knn_distance(const CellPointSet& a, const CellPointSet& b, int k, double cell_size) {
  if (k < 1) throw PreconditionError("mean_knn_distance: k must be positive");
  if (a.empty()) throw PreconditionError("mean_knn_distance: A is empty");
  if (b.size() < std::size_t(k)) throw InsufficientTargetsError(b.size(), std::size_t(k));
  const PointIndex index(b, cell_size);
  double sum = 0.0;
  for (const Cell c : a) sum += index.nearest(center_of(c, cell_size), std::size_t(k)).back().distance;
  return sum / double(a.size());
}

KnnCurve knn_curve(const CellPointSet& a, const CellPointSet& b, int k_max, double cell_size) {
  if (k_max < 1) throw PreconditionError("knn_curve: k_max must be positive");
  if (a.empty()) throw PreconditionError("knn_curve: A is empty");
  if (b.size() < std::size_t(k_max)) throw InsufficientTargetsError(b.size(), std::size_t(k_max));
  const PointIndex index(b, cell_size);
  std::vector<double> sums(std::size_t(k_max), 0.0);
  for (const Cell c : a) {
    const auto nn = index.nearest(center_of(c, cell_size), std::size_t(k_max));
    for (std::size_t k = 0; k < nn.size(); ++k) sums[k] += nn[k].distance;
  }
  KnnCurve curve;
  for (int k = 1; k <= k_max; ++k) {
    curve.ks.push_back(k);
    curve.values.push_back(sums[std::size_t(k - 1)] / double(a.size()));
  }
  return curve;
}

double coverage_ratio(const CellPointSet& a, const CellPointSet& b, double r, double cell_size) {
  return coverage_curve(a, b, {r}, cell_size).values.front();
}

CoverageCurve coverage_curve(const CellPointSet& a, const CellPointSet& b, const std::vector<double>& radii,
                             double cell_size) {
  if (b.empty()) throw UndefinedRatioError("coverage ratio: B is empty");
  for (const double r : radii)
    if (!(r >= 0.0)) throw PreconditionError("coverage ratio: radius must be >= 0");
  auto nearest = nearest_to_set(b, a, cell_size);
  std::sort(nearest.begin(), nearest.end());
  CoverageCurve curve;
  curve.radii = radii;
  for (const double r : radii) {
    const auto below = std::lower_bound(nearest.begin(), nearest.end(), r) - nearest.begin();
    curve.values.push_back(double(below) / double(b.size()));
  }
  return curve;
}

DensityPairSet normalized_density_pairs(const CellPointSet& a, const CellPointSet& b, double d_count,
                                        double cell_size) {
  if (a.empty()) throw PreconditionError("normalized density: A is empty");
  if (!(d_count > 0.0)) throw PreconditionError("normalized density: d_count must be positive");
  const PointIndex index_a(a, cell_size);
  const PointIndex index_b(b, cell_size);
  std::vector<std::size_t> same(a.size()), next(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Point x = center_of(a[i], cell_size);
    same[i] = index_a.count_within(x, d_count);
    next[i] = index_b.count_within(x, d_count);
  }
  const double max_same = double(*std::max_element(same.begin(), same.end()));
  const double max_next = double(*std::max_element(next.begin(), next.end()));
  DensityPairSet out;
  out.d_count = d_count;
  out.pairs.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    out.pairs.push_back({double(same[i]) / max_same, max_next > 0.0 ? double(next[i]) / max_next : 0.0});
  return out;
}

std::vector<CurvePoint> inhibit_curve(const DensityPairSet& pairs) {
  std::map<double, std::pair<double, std::size_t>> groups;
  for (const auto& p : pairs.pairs) {
    auto& g = groups[p.same_level];
    g.first += p.next_level;
    ++g.second;
  }
  std::vector<CurvePoint> out;
  out.reserve(groups.size());
  for (const auto& [x, g] : groups) out.push_back({x, g.first / double(g.second)});
  return out;
}

CellPointSet null_model_random1(const CellPointSet& a_obs, std::size_t n_lower, const RoadMask& road,
                                std::uint64_t seed) {
  const auto excluded = a_obs.sorted();
  std::vector<Cell> pool;
  pool.reserve(road.size());
  for (const Cell c : road.cells())
    if (!std::binary_search(excluded.begin(), excluded.end(), c)) pool.push_back(c);
  if (pool.size() < n_lower) throw InsufficientRoadCellsError(pool.size(), n_lower);
  Rng rng(seed);
  std::vector<Cell> picked;
  picked.reserve(n_lower);
  for (const auto i : sample_without_replacement(pool.size(), n_lower, rng)) picked.push_back(pool[i]);
  std::sort(picked.begin(), picked.end());
  return CellPointSet(std::move(picked));
}

std::pair<CellPointSet, CellPointSet> null_model_random2(std::size_t n_upper, std::size_t n_lower,
                                                         const RoadMask& road, std::uint64_t seed) {
  if (road.size() < n_upper + n_lower) throw InsufficientRoadCellsError(road.size(), n_upper + n_lower);
  Rng rng(seed);
  const auto draw = sample_without_replacement(road.size(), n_upper + n_lower, rng);
  std::vector<Cell> upper, lower;
  for (std::size_t i = 0; i < draw.size(); ++i) (i < n_upper ? upper : lower).push_back(road.cells()[draw[i]]);
  std::sort(upper.begin(), upper.end());
  std::sort(lower.begin(), lower.end());
  return {CellPointSet(std::move(upper)), CellPointSet(std::move(lower))};
}

std::vector<double> default_radius_grid() {
  std::vector<double> grid;
  for (int r = 0; r <= 2000; r += 50) grid.push_back(double(r));
  return grid;
}

PatternReport pattern_report(const std::vector<CellPointSet>& levels, const RoadMask& road,
                             const MetricConfig& config) {
  if (levels.size() < 2) throw PreconditionError("pattern report requires at least 2 levels, got " +
                                                 std::to_string(levels.size()));
  if (config.n_runs == 0) throw PreconditionError("pattern report: n_runs must be positive");
  if (config.k_max < 1) throw PreconditionError("pattern report: k_max must be positive");
  const double cs = road.grid().cell_size;

  PatternReport report;
  report.config = config;
  for (std::size_t li = 0; li + 1 < levels.size(); ++li) {
    const CellPointSet& a = levels[li];
    const CellPointSet& b = levels[li + 1];
    if (a.empty() || b.empty()) throw PreconditionError("pattern report: level " + std::to_string(li + 1) +
                                                        " or its successor is empty");
    {
      const auto sa = a.sorted(), sb = b.sorted();
      std::vector<Cell> common;
      std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(common));
      if (!common.empty()) throw PreconditionError("pattern report: adjacent levels share cells");
    }

    LevelPairReport pr;
    pr.upper_level = int(li) + 1;
    pr.n_upper = a.size();
    pr.n_lower = b.size();
    const int k_max = std::min<int>(config.k_max, int(b.size()));
    pr.knn = knn_curve(a, b, k_max, cs);
    pr.coverage = coverage_curve(a, b, config.r_grid, cs);
    for (const double d : config.d_counts) {
      InhibitResult ir;
      ir.d_count = d;
      ir.pairs = normalized_density_pairs(a, b, d, cs);
      ir.curve = inhibit_curve(ir.pairs);
      pr.inhibit.push_back(std::move(ir));
    }

    const std::uint64_t pair_seed = derive_seed(config.master_seed, li);
    std::vector<std::vector<double>> knn1(config.n_runs), knn2(config.n_runs), cov1(config.n_runs),
        cov2(config.n_runs);
    parallel_for(config.n_runs, config.threads, [&](std::size_t run) {
      const std::uint64_t run_seed = derive_seed(pair_seed, run);
      const auto b1 = null_model_random1(a, b.size(), road, derive_seed(run_seed, 1));
      knn1[run] = knn_curve(a, b1, k_max, cs).values;
      cov1[run] = coverage_curve(a, b1, config.r_grid, cs).values;
      const auto [a2, b2] = null_model_random2(a.size(), b.size(), road, derive_seed(run_seed, 2));
      knn2[run] = knn_curve(a2, b2, k_max, cs).values;
      cov2[run] = coverage_curve(a2, b2, config.r_grid, cs).values;
    });
    std::vector<double> kgrid(pr.knn.ks.begin(), pr.knn.ks.end());
    pr.knn_random1 = {kgrid, quantile_band(knn1)};
    pr.knn_random2 = {kgrid, quantile_band(knn2)};
    pr.coverage_random1 = {config.r_grid, quantile_band(cov1)};
    pr.coverage_random2 = {config.r_grid, quantile_band(cov2)};
    report.pairs.push_back(std::move(pr));
  }
  return report;
}

}  // namespace hotspots
