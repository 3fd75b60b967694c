#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "hotspots/grid.hpp"

namespace hotspots {

using Polyline = std::vector<GeoPoint>;

/// Marks every cell touched by a projected segment (supercover, closed cell
/// squares) and dilates the result by `buffer_cells` in Chebyshev distance.
/// Equivalently, a cell is on the road when the Chebyshev distance from its
/// center to some segment is at most (buffer_cells + 0.5) * cell_size.
RoadMask rasterize_roads(std::span<const Polyline> polylines, const GridSpec& grid, int buffer_cells);

/// Inclusive index window used to clip traversals.
struct CellWindow {
  std::int32_t row_lo = std::numeric_limits<std::int32_t>::min() / 2;
  std::int32_t row_hi = std::numeric_limits<std::int32_t>::max() / 2;
  std::int32_t col_lo = std::numeric_limits<std::int32_t>::min() / 2;
  std::int32_t col_hi = std::numeric_limits<std::int32_t>::max() / 2;
};

/// Supercover traversal of one segment given in cell units (cell (r, c)
/// spans [c, c+1] x [r, r+1]), restricted to `window`.
std::vector<Cell> supercover(Point a, Point b, const CellWindow& window = {});

}  // namespace hotspots
