#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hotspots/grid.hpp"
#include "hotspots/point_index.hpp"
#include "hotspots/quantiles.hpp"

namespace hotspots {

enum class Mechanism { Knn, Global, Random };

const char* to_string(Mechanism m);
/// Parses "knn", "global" or "random"; throws InputError otherwise.
Mechanism parse_mechanism(const std::string& name);

struct MechanismParams {
  Mechanism mechanism = Mechanism::Knn;
  int k = 3;                 ///< nearest higher-level hotspots considered (knn only)
  double alpha = 1.0;        ///< distance-decay exponent
  double d_cut = 1000.0;     ///< meters beyond which a hotspot exerts no pull
  int x_radius_cells = 4;    ///< half-width of the exclusion square around picks

  void validate() const;
};

/// Unnormalized pull of the higher-level set on location x.
///   knn:    sum over the k nearest y of d(x,y)^-alpha, for d <= d_cut
///   global: the same sum over every y with d <= d_cut
///   random: 1 when the nearest y is within d_cut, else 0
/// Throws SingularDistanceError if x coincides with a hotspot within range.
double attraction(Point x, const PointIndex& higher, const MechanismParams& params);
double attraction(Cell x, const CellPointSet& higher, const MechanismParams& params, double cell_size);

/// B_1 = O_1; B_i keeps the hotspots of O_i farther than d_cut from every
/// hotspot of B_1..B_{i-1}.
std::vector<CellPointSet> background_split(std::span<const CellPointSet> observed, double d_cut, double cell_size);

/// Mutable set of cells still available for placement.
class CandidatePool {
 public:
  CandidatePool(const GridSpec& grid, std::span<const Cell> cells);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return alive_count_; }
  bool contains(Cell c) const { return grid_.contains(c) && alive_[grid_.linear(c)] != 0; }
  void remove(Cell c);
  /// Removes every cell within Chebyshev distance `radius` of center.
  void remove_square(Cell center, int radius);
  /// Live cells in lexicographic order.
  std::vector<Cell> cells() const;

 private:
  GridSpec grid_;
  std::vector<Cell> all_;  // sorted
  std::vector<std::uint8_t> alive_;
  std::size_t alive_count_ = 0;
};

/// Picks n cells one at a time with probability proportional to attraction
/// to `higher`; each pick removes its exclusion square from the pool.
/// Throws ExhaustionError when the pool empties early and ZeroAttractionError
/// when only zero-attraction cells remain.
CellPointSet simulate_level(const CellPointSet& higher, CandidatePool& pool, std::size_t n,
                            const MechanismParams& params, std::uint64_t seed);

struct LevelRecord {
  int level = 1;
  std::size_t observed = 0;
  CellPointSet background;
  CellPointSet simulated;
  std::size_t candidates_before = 0;
  std::size_t candidates_after = 0;
};

struct SimulationRun {
  std::uint64_t seed = 0;
  MechanismParams params;
  std::vector<LevelRecord> levels;  ///< one per observed level, level 1 first
  bool complete = true;
  std::optional<int> failed_level;
  std::string failure;

  /// H_i = S_i ∪ B_i for the level at position i.
  CellPointSet combined(std::size_t i) const;
};

/// Level-by-level reproduction of observed levels 2..m starting from the
/// level-1 background. A level that cannot be filled ends the run early with
/// `complete == false`.
SimulationRun simulate_cascade(std::span<const CellPointSet> observed, const RoadMask& road,
                               const MechanismParams& params, std::uint64_t seed);

/// Root-mean-square over x in O of Count(x, O, d) - Count(x, S, d).
double rmse_compare(const CellPointSet& observed, const CellPointSet& simulated, double d_rmse, double cell_size);

std::vector<double> default_rmse_grid();

struct ExperimentConfig {
  std::vector<Mechanism> mechanisms{Mechanism::Knn, Mechanism::Global, Mechanism::Random};
  MechanismParams params;  ///< mechanism field is overridden per mechanism
  std::size_t n_sims = 100;
  std::vector<double> d_rmse = default_rmse_grid();
  std::uint64_t master_seed = 0;
  unsigned threads = 1;
};

struct RmseCurve {
  Mechanism mechanism = Mechanism::Knn;
  int level = 2;
  std::vector<double> d_rmse;
  QuantileBand band;
};

struct MechanismResult {
  Mechanism mechanism = Mechanism::Knn;
  std::vector<RmseCurve> levels;  ///< levels 2..m
  std::size_t complete_runs = 0;
  std::size_t partial_runs = 0;
  std::optional<SimulationRun> first_run;
};

/// n_sims cascades per mechanism (run r uses the same seed for every
/// mechanism), RMSE per level over the d_rmse grid, and 10/50/90% quantiles
/// over complete runs.
std::vector<MechanismResult> mechanism_experiment(std::span<const CellPointSet> observed, const RoadMask& road,
                                                  const ExperimentConfig& config);

}  // namespace hotspots
