#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hotspots/grid.hpp"

namespace hotspots {

/// A detected local hotspot. `center` is the local-maximum cell.
struct Hotspot {
  std::size_t id = 0;
  Cell center;
  std::vector<Cell> members;  ///< sorted, includes center
  std::uint64_t stops = 0;    ///< sum of raster counts over members
  std::optional<int> level;   ///< 1 = most popular; set by classification
};

/// Mass used by the gravity rule when contested cells are reassigned.
enum class GravityMass {
  CenterCount,        ///< count of the center cell
  NeighborhoodStops,  ///< total count of the center's full square neighborhood
};

struct GravityOptions {
  double exponent = 2.0;
  GravityMass mass = GravityMass::CenterCount;
};

struct RadiusRange {
  int lo = 1;
  int hi = 15;
};

struct DetectionParams {
  std::optional<int> radius_cells;            ///< nullopt = elbow selection
  RadiusRange radius_search{1, 15};
  std::optional<std::uint64_t> min_stops;     ///< nullopt = head/tail breaks
  GravityOptions gravity;
};

/// Nonzero cells that hold the maximum of their (2r+1)^2 neighborhood and are
/// the lexicographically first cell reaching it there. Sorted by (row, col).
CellPointSet find_local_maxima(const DensityRaster& raster, int radius_cells);

struct ElbowResult {
  int radius = 0;
  std::vector<int> radii;
  std::vector<std::size_t> maxima_counts;  ///< m(r) for each radius
};

/// Max-distance-to-chord elbow of the curve r -> |find_local_maxima(r)|.
/// Throws NoElbowError when fewer than three radii are given or the curve has
/// no point off the chord.
ElbowResult select_radius_elbow(const DensityRaster& raster, RadiusRange range);

/// Elbow of an arbitrary integer curve (same rule as above).
std::size_t elbow_index(const std::vector<int>& xs, const std::vector<std::size_t>& ys);

/// Assigns every nonzero cell within Chebyshev `radius_cells` of at least one
/// center to the center with the largest gravity mass / dist^exponent. Ties go
/// to the nearer center, then the lexicographically smaller one.
std::vector<Hotspot> reshape_neighborhoods(const CellPointSet& centers, const DensityRaster& raster,
                                           int radius_cells, const GravityOptions& gravity = {});

struct ThresholdResult {
  std::vector<Hotspot> hotspots;
  double threshold = 0.0;
};

/// Keeps hotspots with stops >= min_stops, or, when min_stops is empty, with
/// stops >= the recursive head/tail-breaks mean.
ThresholdResult threshold_popular(std::vector<Hotspot> prelim, std::optional<std::uint64_t> min_stops);

/// Head/tail-breaks threshold: split at the mean and recurse into the head
/// while it is under 40% of the current set and has at least 3 elements.
double head_tail_threshold(const std::vector<std::uint64_t>& values);

struct DetectionResult {
  std::vector<Hotspot> hotspots;  ///< ordered by center, ids 0..n-1
  int radius_cells = 0;
  double min_stops = 0.0;
  std::optional<ElbowResult> elbow;
  std::size_t preliminary_count = 0;
};

/// The full three-step pipeline. With a road mask, off-road cells are zeroed
/// before local maxima are searched.
DetectionResult detect(const DensityRaster& raster, const RoadMask* road_mask, const DetectionParams& params);

}  // namespace hotspots
