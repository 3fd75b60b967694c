#pragma once

#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hotspots {

/// Row/column index of a grid cell. Row grows northward, column eastward.
struct Cell {
  std::int32_t row = 0;
  std::int32_t col = 0;
  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

/// Planar position in meters relative to the grid origin (south-west corner).
struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct GeoPoint {
  double lon = 0.0;
  double lat = 0.0;
};

/// Meters per degree of latitude and per degree of longitude at the equator.
inline constexpr double kMetersPerDegLat = 110540.0;
inline constexpr double kMetersPerDegLon = 111320.0;

/// The analysis lattice. The origin is the south-west corner of cell (0, 0).
struct GridSpec {
  double origin_lon = 0.0;
  double origin_lat = 0.0;
  double cell_size = 10.0;
  std::int32_t n_rows = 1;
  std::int32_t n_cols = 1;
  double ref_latitude = 0.0;

  /// Throws InputError when the spec violates its invariants.
  void validate() const;

  std::size_t cell_count() const { return std::size_t(n_rows) * std::size_t(n_cols); }
  bool contains(Cell c) const { return c.row >= 0 && c.col >= 0 && c.row < n_rows && c.col < n_cols; }
  std::size_t linear(Cell c) const { return std::size_t(c.row) * std::size_t(n_cols) + std::size_t(c.col); }
  Cell from_linear(std::size_t i) const {
    return {static_cast<std::int32_t>(i / std::size_t(n_cols)), static_cast<std::int32_t>(i % std::size_t(n_cols))};
  }

  Point center(Cell c) const { return {(c.col + 0.5) * cell_size, (c.row + 0.5) * cell_size}; }
  /// Cell containing a planar point (floor division); may lie outside the grid.
  Cell cell_of(Point p) const;

  bool operator==(const GridSpec&) const = default;
};

Point project_to_meters(double lon, double lat, const GridSpec& grid);
GeoPoint unproject(Point p, const GridSpec& grid);

/// Immutable per-cell event counts.
class DensityRaster {
 public:
  explicit DensityRaster(const GridSpec& grid);
  DensityRaster(const GridSpec& grid, std::vector<std::uint32_t> counts);

  const GridSpec& grid() const { return grid_; }
  std::uint32_t count(Cell c) const { return counts_[grid_.linear(c)]; }
  std::span<const std::uint32_t> counts() const { return counts_; }
  std::uint64_t total() const { return total_; }

 private:
  GridSpec grid_;
  std::vector<std::uint32_t> counts_;
  std::uint64_t total_ = 0;
};

struct BinResult {
  DensityRaster raster;
  std::size_t out_of_bounds = 0;
};

/// Projects each point and increments the containing cell. Points outside
/// the grid are tallied in `out_of_bounds` and skipped.
BinResult bin_points(std::span<const GeoPoint> points, const GridSpec& grid);

/// Ordered set of cells standing for points at the cell centers.
class CellPointSet {
 public:
  CellPointSet() = default;
  /// Throws InputError on duplicate cells.
  explicit CellPointSet(std::vector<Cell> cells);

  std::span<const Cell> cells() const { return cells_; }
  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }
  const Cell& operator[](std::size_t i) const { return cells_[i]; }
  auto begin() const { return cells_.begin(); }
  auto end() const { return cells_.end(); }

  /// Copy with the cells sorted lexicographically.
  CellPointSet sorted() const;

  bool operator==(const CellPointSet&) const = default;

 private:
  std::vector<Cell> cells_;
};

/// Cells that lie on the road network.
class RoadMask {
 public:
  explicit RoadMask(const GridSpec& grid);
  /// Duplicates are merged; out-of-bounds cells throw InputError.
  RoadMask(const GridSpec& grid, std::vector<Cell> cells);

  const GridSpec& grid() const { return grid_; }
  /// Road cells in lexicographic order.
  std::span<const Cell> cells() const { return cells_; }
  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }
  bool contains(Cell c) const { return grid_.contains(c) && on_road_[grid_.linear(c)] != 0; }

 private:
  GridSpec grid_;
  std::vector<Cell> cells_;
  std::vector<std::uint8_t> on_road_;
};

/// Euclidean distance between two cell centers.
inline double cell_distance(Cell a, Cell b, double cell_size) {
  const double dx = double(a.col - b.col) * cell_size;
  const double dy = double(a.row - b.row) * cell_size;
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace hotspots
