#include "hotspots/point_index.hpp"

#include <algorithm>

#include "hotspots/error.hpp"

namespace hotspots {

PointIndex::PointIndex(const CellPointSet& points, double cell_size, int bucket_cells)
    : cell_size_(cell_size), cells_(points.begin(), points.end()) {
  if (!(cell_size > 0.0)) throw PreconditionError("PointIndex: cell_size must be positive");
  pos_.reserve(cells_.size());
  if (cells_.empty()) {
    bucket_start_.assign(1, 0);
    return;
  }

  std::int32_t rmin = cells_[0].row, rmax = rmin, cmin = cells_[0].col, cmax = cmin;
  for (const Cell c : cells_) {
    rmin = std::min(rmin, c.row);
    rmax = std::max(rmax, c.row);
    cmin = std::min(cmin, c.col);
    cmax = std::max(cmax, c.col);
    pos_.push_back({(c.col + 0.5) * cell_size, (c.row + 0.5) * cell_size});
  }
  row0_ = rmin;
  col0_ = cmin;
  const double extent_r = double(rmax - rmin + 1);
  const double extent_c = double(cmax - cmin + 1);
  if (bucket_cells <= 0) {
    const double per_point = extent_r * extent_c / double(cells_.size());
    bucket_cells = std::max(1, static_cast<int>(std::ceil(std::sqrt(2.0 * per_point))));
  }
  bucket_m_ = bucket_cells * cell_size;
  nbx_ = std::int64_t(cmax - cmin) / bucket_cells + 1;
  nby_ = std::int64_t(rmax - rmin) / bucket_cells + 1;

  // counting sort of points into buckets (CSR layout)
  std::vector<std::size_t> bucket_of(cells_.size());
  bucket_start_.assign(std::size_t(nbx_ * nby_) + 1, 0);
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const std::int64_t bx = (cells_[i].col - cmin) / bucket_cells;
    const std::int64_t by = (cells_[i].row - rmin) / bucket_cells;
    bucket_of[i] = bucket_id(bx, by);
    ++bucket_start_[bucket_of[i] + 1];
  }
  for (std::size_t b = 1; b < bucket_start_.size(); ++b) bucket_start_[b] += bucket_start_[b - 1];
  bucket_items_.resize(cells_.size());
  std::vector<std::uint32_t> fill(bucket_start_.begin(), bucket_start_.end() - 1);
  for (std::size_t i = 0; i < cells_.size(); ++i) bucket_items_[fill[bucket_of[i]]++] = std::uint32_t(i);
}

std::vector<Neighbor> PointIndex::nearest(Point x, std::size_t k, double max_distance) const {
  std::vector<Neighbor> heap;
  if (k == 0 || cells_.empty()) return heap;
  heap.reserve(k + 1);

  // max-heap on (distance, row, col): the front is the current worst
  auto worse = [this](const Neighbor& a, const Neighbor& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return cells_[a.index] < cells_[b.index];
  };

  const double qx = x.x - col0_ * cell_size_;
  const double qy = x.y - row0_ * cell_size_;
  const std::int64_t qbx = bucket_x(qx);
  const std::int64_t qby = bucket_y(qy);

  auto scan_bucket = [&](std::int64_t bx, std::int64_t by) {
    if (!bucket_valid(bx, by)) return;
    const std::size_t b = bucket_id(bx, by);
    for (std::uint32_t s = bucket_start_[b]; s < bucket_start_[b + 1]; ++s) {
      const std::uint32_t i = bucket_items_[s];
      const double dx = pos_[i].x - x.x;
      const double dy = pos_[i].y - x.y;
      const double dist = std::sqrt(dx * dx + dy * dy);
      if (dist > max_distance) continue;
      const Neighbor cand{dist, i};
      if (heap.size() < k) {
        heap.push_back(cand);
        std::push_heap(heap.begin(), heap.end(), worse);
      } else if (worse(cand, heap.front())) {
        std::pop_heap(heap.begin(), heap.end(), worse);
        heap.back() = cand;
        std::push_heap(heap.begin(), heap.end(), worse);
      }
    }
  };

  const std::int64_t j0 =
      std::max<std::int64_t>({0, -qbx, qbx - (nbx_ - 1), -qby, qby - (nby_ - 1)});
  for (std::int64_t j = j0;; ++j) {
    if (j == 0) {
      scan_bucket(qbx, qby);
    } else {
      for (std::int64_t bx = qbx - j; bx <= qbx + j; ++bx) {
        scan_bucket(bx, qby - j);
        scan_bucket(bx, qby + j);
      }
      for (std::int64_t by = qby - j + 1; by <= qby + j - 1; ++by) {
        scan_bucket(qbx - j, by);
        scan_bucket(qbx + j, by);
      }
    }
    const bool covers_all = qbx - j <= 0 && qby - j <= 0 && qbx + j >= nbx_ - 1 && qby + j >= nby_ - 1;
    if (covers_all) break;
    // nothing outside the (2j+1)^2 bucket square can be closer than this
    const double lb = std::min({qx - double(qbx - j) * bucket_m_, double(qbx + j + 1) * bucket_m_ - qx,
                                qy - double(qby - j) * bucket_m_, double(qby + j + 1) * bucket_m_ - qy});
    if (lb > max_distance) break;
    if (heap.size() == k && lb > heap.front().distance) break;
  }

  std::sort_heap(heap.begin(), heap.end(), worse);
  return heap;
}

double PointIndex::nearest_distance(Point x) const {
  const auto nn = nearest(x, 1);
  return nn.empty() ? std::numeric_limits<double>::infinity() : nn.front().distance;
}

std::size_t PointIndex::count_within(Point x, double d) const {
  std::size_t n = 0;
  for_each_within_closed(x, d, [&](std::size_t, double dist) {
    if (dist < d) ++n;
  });
  return n;
}

std::vector<double> knn_distances(Point x, const CellPointSet& targets, std::size_t k, double cell_size) {
  if (k == 0) throw PreconditionError("knn_distances: k must be positive");
  if (targets.size() < k) throw InsufficientTargetsError(targets.size(), k);
  const PointIndex index(targets, cell_size);
  std::vector<double> out;
  out.reserve(k);
  for (const auto& n : index.nearest(x, k)) out.push_back(n.distance);
  return out;
}

std::size_t count_within(Point x, const CellPointSet& targets, double d, double cell_size) {
  if (!(d >= 0.0)) throw PreconditionError("count_within: d must be >= 0");
  return PointIndex(targets, cell_size).count_within(x, d);
}

}  // namespace hotspots
