#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "hotspots/detection.hpp"

namespace hotspots {

/// Lorenz curve of values sorted ascending: point k is (k/n, S_k/S_n).
struct LorenzCurve {
  std::vector<std::pair<double, double>> points;

  /// Segment slopes are non-decreasing.
  bool is_convex() const;
};

LorenzCurve lorenz_curve(std::span<const std::uint64_t> values);

/// x-intercept of the tangent at (1, 1), using the last-segment slope
/// max * n / total. Closed form: 1 - mean / max.
double loubar_threshold(std::span<const std::uint64_t> values);

/// Popularity levels, most popular first. Entries of `levels` are positions
/// into the classified input.
struct LevelPartition {
  std::vector<std::vector<std::size_t>> levels;
  std::vector<double> thresholds;  ///< Loubar x-intercept used for each level
};

/// Iterative Loubar classification of positive values. Each round takes the
/// top ceil(total / max) values of what remains (those whose ascending rank
/// fraction exceeds x*), promoting every value tied with the smallest one taken.
LevelPartition classify_values(std::span<const std::uint64_t> values);

/// classify_values over hotspot stops; indices refer to positions in `hotspots`.
LevelPartition classify_levels(std::span<const Hotspot> hotspots);

/// Writes 1-based levels into hotspots[i].level.
void assign_levels(std::span<Hotspot> hotspots, const LevelPartition& partition);

/// One summary row per level.
struct LevelSummary {
  int level = 0;
  std::size_t hotspot_count = 0;
  double stop_fraction_lo = 0.0;  ///< cumulative share of stops before this level
  double stop_fraction_hi = 0.0;  ///< cumulative share including this level
  std::uint64_t max_stops = 0;
  std::uint64_t min_stops = 0;
  double median_stops = 0.0;
};

std::vector<LevelSummary> summarize_levels(std::span<const Hotspot> hotspots, const LevelPartition& partition);

}  // namespace hotspots
