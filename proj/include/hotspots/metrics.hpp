#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hotspots/grid.hpp"
#include "hotspots/quantiles.hpp"

namespace hotspots {

/// Mean k-th nearest distance from A to B for k = 1..k_max.
struct KnnCurve {
  std::vector<int> ks;
  std::vector<double> values;  ///< meters
};

/// Share of B lying closer than r to A, over a grid of radii.
struct CoverageCurve {
  std::vector<double> radii;   ///< meters, ascending
  std::vector<double> values;  ///< fractions in [0, 1]
};

/// (same-level, next-level) normalized densities of one hotspot of A.
struct DensityPair {
  double same_level = 0.0;
  double next_level = 0.0;
};

struct DensityPairSet {
  std::vector<DensityPair> pairs;  ///< one per hotspot of A, in A's order
  double d_count = 0.0;
};

struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
};

/// Null-model quantiles over a statistic grid (k values or radii).
struct NullBand {
  std::vector<double> grid;
  QuantileBand band;
};

/// Mean over x in A of the k-th smallest distance from x to B.
/// Throws InsufficientTargetsError when |B| < k. A and B are expected to be disjoint.
double mean_knn_distance(const CellPointSet& a, const CellPointSet& b, int k, double cell_size);
KnnCurve knn_curve(const CellPointSet& a, const CellPointSet& b, int k_max, double cell_size);

/// |{x in B : min_y∈A d(x, y) < r}| / |B|. Throws UndefinedRatioError for empty B.
double coverage_ratio(const CellPointSet& a, const CellPointSet& b, double r, double cell_size);
CoverageCurve coverage_curve(const CellPointSet& a, const CellPointSet& b, const std::vector<double>& radii,
                             double cell_size);

/// Counts neighbors strictly within d_count; a point of A counts itself.
/// Next-level components are 0 when no point of A has a B neighbor.
DensityPairSet normalized_density_pairs(const CellPointSet& a, const CellPointSet& b, double d_count,
                                        double cell_size);

/// Mean next-level density for each distinct same-level value, ascending.
std::vector<CurvePoint> inhibit_curve(const DensityPairSet& pairs);

/// n_lower road cells drawn uniformly without replacement, avoiding A's cells.
CellPointSet null_model_random1(const CellPointSet& a_obs, std::size_t n_lower, const RoadMask& road,
                                std::uint64_t seed);

/// Disjoint uniform draws of n_upper and n_lower road cells.
std::pair<CellPointSet, CellPointSet> null_model_random2(std::size_t n_upper, std::size_t n_lower,
                                                         const RoadMask& road, std::uint64_t seed);

std::vector<double> default_radius_grid();

struct MetricConfig {
  int k_max = 20;
  std::vector<double> r_grid = default_radius_grid();
  std::vector<double> d_counts{500.0, 1000.0, 2000.0};
  std::size_t n_runs = 100;
  std::uint64_t master_seed = 0;
  unsigned threads = 1;
};

struct InhibitResult {
  double d_count = 0.0;
  DensityPairSet pairs;
  std::vector<CurvePoint> curve;
};

/// Metrics for one adjacent pair: A = level `upper_level`, B = the next level.
struct LevelPairReport {
  int upper_level = 1;
  std::size_t n_upper = 0;
  std::size_t n_lower = 0;
  KnnCurve knn;
  CoverageCurve coverage;
  std::vector<InhibitResult> inhibit;
  NullBand knn_random1;
  NullBand knn_random2;
  NullBand coverage_random1;
  NullBand coverage_random2;
};

struct PatternReport {
  MetricConfig config;
  std::vector<LevelPairReport> pairs;
};

/// Observed curves and null-model bands for every adjacent level pair.
/// `levels[i]` holds the centers of level i+1. Requires at least two levels.
PatternReport pattern_report(const std::vector<CellPointSet>& levels, const RoadMask& road,
                             const MetricConfig& config);

}  // namespace hotspots
