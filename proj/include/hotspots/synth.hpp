#pragma once

#include <cstdint>
#include <vector>

#include "hotspots/grid.hpp"
#include "hotspots/roads.hpp"
#include "hotspots/simulation.hpp"

namespace hotspots {

/// How centers of levels below the first are planted.
enum class Placement {
  Spawn,    ///< each parent gets its share of children nearby (accompanying only)
  Knn,      ///< road cells drawn by attraction to the previous level
  Uniform,  ///< road cells drawn uniformly
};

/// Caps the lower-level centers around dense higher-level clusters.
struct InhibitionSpec {
  bool enabled = false;
  double radius_m = 500.0;   ///< disc radius around each higher-level center
  int dense_threshold = 4;   ///< higher-level centers in the disc that make it "dense"
  int cap = 1;               ///< lower-level centers allowed in a dense disc
};

/// Ground-truth substrate for tests and demos: a grid street network with
/// planted hotspots on several popularity levels, and stops scattered around
/// each planted center.
struct SyntheticCitySpec {
  GridSpec grid{114.2, 30.5, 10.0, 800, 800, 30.5};
  int street_spacing_cells = 8;
  int detection_radius_cells = 4;
  /// Chebyshev gap kept free around each planted center; 0 means 3x the
  /// detection radius, which keeps a neighbor's footprint out of every
  /// neighborhood that touches the center.
  int spacing_cells = 0;
  double border_m = 300.0;         ///< no level-1 anchor closer than this to the edge

  std::vector<int> cluster_sizes{6, 5, 4, 3, 3, 2, 2, 1};  ///< level-1 anchors per cluster
  double cluster_radius_m = 250.0;
  double cluster_separation_m = 2500.0;

  std::vector<double> level_multipliers{3.0, 2.0, 2.0};  ///< size of level i+1 relative to level i
  Placement placement = Placement::Knn;
  double accompany_decay_m = 100.0;  ///< Spawn kernel scale; <= 0 scatters children uniformly
  MechanismParams planting;          ///< attraction used by Placement::Knn
  InhibitionSpec inhibition;

  std::vector<std::uint32_t> stops_per_level{400, 200, 100, 50};
  double core_fraction = 0.3;      ///< share of a hotspot's stops inside its center cell
  double scatter_sigma_m = 40.0;   ///< Gaussian spread of the remaining stops, cut at the detection radius
  std::size_t noise_stops = 0;     ///< extra stops spread uniformly over road cells
  std::uint64_t seed = 1;
};

struct PlantedHotspot {
  Cell center;
  int level = 1;
  std::uint64_t stops = 0;
};

struct SyntheticCity {
  GridSpec grid;
  RoadMask roads;
  std::vector<Polyline> road_lines;
  std::vector<GeoPoint> stops;
  std::vector<PlantedHotspot> truth;  ///< level-major, placement order within a level
  std::size_t inhibited = 0;          ///< children dropped by the inhibition cap

  /// Planted centers of each level, level 1 first.
  std::vector<CellPointSet> levels() const;
};

/// Throws PreconditionError when the spec cannot be realized.
SyntheticCity synth_city(const SyntheticCitySpec& spec);

}  // namespace hotspots
