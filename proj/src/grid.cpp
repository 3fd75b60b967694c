#include "hotspots/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "hotspots/error.hpp"

namespace hotspots {

namespace {

double lon_scale(const GridSpec& grid) {
  return kMetersPerDegLon * std::cos(grid.ref_latitude * std::numbers::pi / 180.0);
}

}  // namespace

void GridSpec::validate() const {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) throw InputError("grid: cell_size must be positive");
  if (n_rows <= 0 || n_cols <= 0) throw InputError("grid: n_rows and n_cols must be positive");
  if (!std::isfinite(origin_lon) || !std::isfinite(origin_lat)) throw InputError("grid: origin must be finite");
  if (!std::isfinite(ref_latitude) || std::abs(ref_latitude) >= 90.0)
    throw InputError("grid: ref_latitude must lie in (-90, 90)");
}

Cell GridSpec::cell_of(Point p) const {
  return {static_cast<std::int32_t>(std::floor(p.y / cell_size)),
          static_cast<std::int32_t>(std::floor(p.x / cell_size))};
}

Point project_to_meters(double lon, double lat, const GridSpec& grid) {
  if (!std::isfinite(lon) || !std::isfinite(lat) || std::abs(lat) >= 90.0)
    throw InvalidCoordinateError("invalid coordinate (" + std::to_string(lon) + ", " + std::to_string(lat) + ")");
  return {(lon - grid.origin_lon) * lon_scale(grid), (lat - grid.origin_lat) * kMetersPerDegLat};
}

GeoPoint unproject(Point p, const GridSpec& grid) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw InvalidCoordinateError("invalid planar coordinate");
  return {grid.origin_lon + p.x / lon_scale(grid), grid.origin_lat + p.y / kMetersPerDegLat};
}

DensityRaster::DensityRaster(const GridSpec& grid) : grid_(grid), counts_(grid.cell_count(), 0u) {
  grid_.validate();
}

DensityRaster::DensityRaster(const GridSpec& grid, std::vector<std::uint32_t> counts)
    : grid_(grid), counts_(std::move(counts)) {
  grid_.validate();
  if (counts_.size() != grid_.cell_count()) throw InputError("raster: count vector does not match grid size");
  total_ = std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

BinResult bin_points(std::span<const GeoPoint> points, const GridSpec& grid) {
  grid.validate();
  std::vector<std::uint32_t> counts(grid.cell_count(), 0u);
  std::size_t outside = 0;
  for (const auto& gp : points) {
    const Cell c = grid.cell_of(project_to_meters(gp.lon, gp.lat, grid));
    if (!grid.contains(c)) {
      ++outside;
      continue;
    }
    ++counts[grid.linear(c)];
  }
  return {DensityRaster(grid, std::move(counts)), outside};
}

CellPointSet::CellPointSet(std::vector<Cell> cells) : cells_(std::move(cells)) {
  std::vector<Cell> check(cells_);
  std::sort(check.begin(), check.end());
  if (std::adjacent_find(check.begin(), check.end()) != check.end())
    throw InputError("cell point set contains duplicate cells");
}

CellPointSet CellPointSet::sorted() const {
  CellPointSet out;
  out.cells_ = cells_;
  std::sort(out.cells_.begin(), out.cells_.end());
  return out;
}

RoadMask::RoadMask(const GridSpec& grid) : grid_(grid), on_road_(grid.cell_count(), 0) { grid_.validate(); }

RoadMask::RoadMask(const GridSpec& grid, std::vector<Cell> cells) : RoadMask(grid) {
  for (const Cell c : cells) {
    if (!grid_.contains(c))
      throw InputError("road cell (" + std::to_string(c.row) + ", " + std::to_string(c.col) + ") outside grid");
    on_road_[grid_.linear(c)] = 1;
  }
  cells_.reserve(cells.size());
  for (std::size_t i = 0; i < on_road_.size(); ++i)
    if (on_road_[i]) cells_.push_back(grid_.from_linear(i));
}

}  // namespace hotspots
