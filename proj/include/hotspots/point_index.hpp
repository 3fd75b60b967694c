#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "hotspots/grid.hpp"

namespace hotspots {

struct Neighbor {
  double distance = 0.0;
  std::size_t index = 0;  ///< position in the indexed CellPointSet
};

/// Exact nearest-neighbor and range queries over cell centers.
///
/// Points are hashed into square buckets (a coarse grid laid over the cell
/// lattice). k-nearest queries walk rings of buckets outward and stop once
/// the ring lower bound exceeds the current k-th distance, so results are
/// exact. Distances are `sqrt(dx*dx + dy*dy)` in meters between centers.
class PointIndex {
 public:
  /// `bucket_cells` <= 0 picks a size giving about two points per bucket.
  PointIndex(const CellPointSet& points, double cell_size, int bucket_cells = 0);

  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }
  double cell_size() const { return cell_size_; }
  const Cell& cell(std::size_t i) const { return cells_[i]; }

  /// The k nearest points, ascending by distance, ties by (row, col).
  /// Only points with distance <= max_distance are considered, so fewer than
  /// k may be returned when a bound is given.
  std::vector<Neighbor> nearest(Point x, std::size_t k,
                                double max_distance = std::numeric_limits<double>::infinity()) const;

  /// Distance to the closest point; +inf when empty.
  double nearest_distance(Point x) const;

  /// Number of points with distance strictly below d.
  std::size_t count_within(Point x, double d) const;

  /// Calls fn(index, distance) for every point with distance <= d.
  template <class Fn>
  void for_each_within_closed(Point x, double d, Fn&& fn) const;

 private:
  std::int64_t bucket_x(double x) const { return static_cast<std::int64_t>(std::floor(x / bucket_m_)); }
  std::int64_t bucket_y(double y) const { return static_cast<std::int64_t>(std::floor(y / bucket_m_)); }
  bool bucket_valid(std::int64_t bx, std::int64_t by) const {
    return bx >= 0 && by >= 0 && bx < nbx_ && by < nby_;
  }
  std::size_t bucket_id(std::int64_t bx, std::int64_t by) const { return std::size_t(by * nbx_ + bx); }

  double cell_size_;
  double bucket_m_ = 1.0;
  std::int32_t row0_ = 0;  // origin of the bucket lattice in cells
  std::int32_t col0_ = 0;
  std::int64_t nbx_ = 0;
  std::int64_t nby_ = 0;
  std::vector<Cell> cells_;
  std::vector<Point> pos_;  // cell centers in meters
  std::vector<std::uint32_t> bucket_start_;
  std::vector<std::uint32_t> bucket_items_;
};

/// Distances from x to the k nearest target cell centers, ascending.
/// Throws InsufficientTargetsError when |targets| < k.
std::vector<double> knn_distances(Point x, const CellPointSet& targets, std::size_t k, double cell_size);

/// |{y in targets : dist(x, y) < d}|.
std::size_t count_within(Point x, const CellPointSet& targets, double d, double cell_size);

template <class Fn>
void PointIndex::for_each_within_closed(Point x, double d, Fn&& fn) const {
  if (cells_.empty() || !(d >= 0.0)) return;
  const double qx = x.x - col0_ * cell_size_;
  const double qy = x.y - row0_ * cell_size_;
  const std::int64_t bx0 = std::max<std::int64_t>(0, bucket_x(qx - d));
  const std::int64_t bx1 = std::min<std::int64_t>(nbx_ - 1, bucket_x(qx + d));
  const std::int64_t by0 = std::max<std::int64_t>(0, bucket_y(qy - d));
  const std::int64_t by1 = std::min<std::int64_t>(nby_ - 1, bucket_y(qy + d));
  for (std::int64_t by = by0; by <= by1; ++by) {
    for (std::int64_t bx = bx0; bx <= bx1; ++bx) {
      const std::size_t b = bucket_id(bx, by);
      for (std::uint32_t k = bucket_start_[b]; k < bucket_start_[b + 1]; ++k) {
        const std::uint32_t i = bucket_items_[k];
        const double dx = pos_[i].x - x.x;
        const double dy = pos_[i].y - x.y;
        const double dist = std::sqrt(dx * dx + dy * dy);
        if (dist <= d) fn(std::size_t(i), dist);
      }
    }
  }
}

}  // namespace hotspots
