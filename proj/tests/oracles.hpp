#pragma once

// Slow, obviously-correct reference implementations used to cross-check the
// library. Nothing here shares code with src/.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <vector>

#include "hotspots/grid.hpp"

namespace oracle {

using hotspots::Cell;
using hotspots::CellPointSet;

inline double dist(double ax, double ay, double bx, double by) { return std::hypot(ax - bx, ay - by); }

inline double cell_dist(Cell a, Cell b, double cs) {
  return dist((a.col + 0.5) * cs, (a.row + 0.5) * cs, (b.col + 0.5) * cs, (b.row + 0.5) * cs);
}

/// All distances from (x, y) to the targets, sorted.
inline std::vector<double> sorted_distances(double x, double y, const std::vector<Cell>& targets, double cs) {
  std::vector<double> d;
  for (const Cell& t : targets) d.push_back(dist(x, y, (t.col + 0.5) * cs, (t.row + 0.5) * cs));
  std::sort(d.begin(), d.end());
  return d;
}

inline std::size_t count_within(double x, double y, const std::vector<Cell>& targets, double r, double cs) {
  std::size_t n = 0;
  for (const Cell& t : targets)
    if (dist(x, y, (t.col + 0.5) * cs, (t.row + 0.5) * cs) < r) ++n;
  return n;
}

inline double min_distance(Cell x, const std::vector<Cell>& set, double cs) {
  double best = std::numeric_limits<double>::infinity();
  for (const Cell& y : set) best = std::min(best, cell_dist(x, y, cs));
  return best;
}

inline double mean_knn(const std::vector<Cell>& a, const std::vector<Cell>& b, std::size_t k, double cs) {
  double sum = 0.0;
  for (const Cell& x : a) sum += sorted_distances((x.col + 0.5) * cs, (x.row + 0.5) * cs, b, cs)[k - 1];
  return sum / double(a.size());
}

inline double coverage(const std::vector<Cell>& a, const std::vector<Cell>& b, double r, double cs) {
  std::size_t hit = 0;
  for (const Cell& x : b)
    if (min_distance(x, a, cs) < r) ++hit;
  return double(hit) / double(b.size());
}

/// n distinct random cells in [0, rows) x [0, cols).
inline std::vector<Cell> random_cells(std::mt19937_64& gen, std::size_t n, int rows, int cols) {
  std::set<Cell> s;
  std::uniform_int_distribution<int> r(0, rows - 1), c(0, cols - 1);
  while (s.size() < n) s.insert({r(gen), c(gen)});
  std::vector<Cell> v(s.begin(), s.end());
  std::shuffle(v.begin(), v.end(), gen);
  return v;
}

/// Splits a set of distinct cells into two disjoint random sets.
inline std::pair<std::vector<Cell>, std::vector<Cell>> random_disjoint(std::mt19937_64& gen, std::size_t na,
                                                                       std::size_t nb, int rows, int cols) {
  auto all = random_cells(gen, na + nb, rows, cols);
  return {std::vector<Cell>(all.begin(), all.begin() + long(na)), std::vector<Cell>(all.begin() + long(na), all.end())};
}

/// Does the closed segment (ax,ay)-(bx,by) meet the closed box [x0,x1]x[y0,y1]?
/// Liang-Barsky clipping.
inline bool segment_hits_box(double ax, double ay, double bx, double by, double x0, double x1, double y0, double y1) {
  double t0 = 0.0, t1 = 1.0;
  const double dx = bx - ax, dy = by - ay;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {ax - x0, x1 - ax, ay - y0, y1 - ay};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
    } else {
      const double t = q[i] / p[i];
      if (p[i] < 0.0) t0 = std::max(t0, t);
      else t1 = std::min(t1, t);
    }
  }
  return t0 <= t1;
}

/// Max of the (2r+1)^2 window around c (clipped to the grid).
inline std::uint32_t window_max(const std::vector<std::uint32_t>& counts, int rows, int cols, Cell c, int r) {
  std::uint32_t m = 0;
  for (int i = std::max(0, c.row - r); i <= std::min(rows - 1, c.row + r); ++i)
    for (int j = std::max(0, c.col - r); j <= std::min(cols - 1, c.col + r); ++j)
      m = std::max(m, counts[std::size_t(i) * std::size_t(cols) + std::size_t(j)]);
  return m;
}

/// Local maxima by direct scan: nonzero, equal to the window max, and the
/// first cell (row-major) in the window holding that max.
inline std::vector<Cell> local_maxima(const std::vector<std::uint32_t>& counts, int rows, int cols, int r) {
  std::vector<Cell> out;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      const std::uint32_t v = counts[std::size_t(i) * std::size_t(cols) + std::size_t(j)];
      if (v == 0 || v != window_max(counts, rows, cols, {i, j}, r)) continue;
      bool first = true;
      for (int a = std::max(0, i - r); a <= std::min(rows - 1, i + r) && first; ++a)
        for (int b = std::max(0, j - r); b <= std::min(cols - 1, j + r); ++b) {
          if (Cell{a, b} >= Cell{i, j}) break;
          if (counts[std::size_t(a) * std::size_t(cols) + std::size_t(b)] == v) {
            first = false;
            break;
          }
        }
      if (first) out.push_back({i, j});
    }
  return out;
}

inline std::vector<Cell> cells_of(const CellPointSet& s) { return {s.begin(), s.end()}; }

}  // namespace oracle
