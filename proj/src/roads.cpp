#include "hotspots/roads.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>

#include "hotspots/error.hpp"

namespace hotspots {

std::vector<Cell> supercover(Point a, Point b, const CellWindow& window) {
  std::vector<Cell> out;
  if (a.x > b.x) std::swap(a, b);

  auto rows_between = [&](double y0, double y1, std::int32_t col) {
    if (y0 > y1) std::swap(y0, y1);
    // closed squares: row r touches when r <= y1 and r + 1 >= y0
    const auto r_lo = static_cast<std::int32_t>(std::max<double>(std::ceil(y0) - 1, window.row_lo));
    const auto r_hi = static_cast<std::int32_t>(std::min<double>(std::floor(y1), window.row_hi));
    for (std::int32_t r = r_lo; r <= r_hi; ++r)
      if (double(r) <= y1 && double(r) + 1.0 >= y0) out.push_back({r, col});
  };

  if (a.x == b.x) {
    const auto c_lo = static_cast<std::int32_t>(std::max<double>(std::ceil(a.x) - 1, window.col_lo));
    const auto c_hi = static_cast<std::int32_t>(std::min<double>(std::floor(a.x), window.col_hi));
    for (std::int32_t c = c_lo; c <= c_hi; ++c)
      if (double(c) <= a.x && double(c) + 1.0 >= a.x) rows_between(a.y, b.y, c);
    return out;
  }

  const double slope = (b.y - a.y) / (b.x - a.x);
  auto y_at = [&](double x) {
    if (x <= a.x) return a.y;
    if (x >= b.x) return b.y;
    return a.y + (x - a.x) * slope;
  };
  const auto c_lo = static_cast<std::int32_t>(std::max<double>(std::ceil(a.x) - 1, window.col_lo));
  const auto c_hi = static_cast<std::int32_t>(std::min<double>(std::floor(b.x), window.col_hi));
  for (std::int32_t c = c_lo; c <= c_hi; ++c) {
    const double x0 = std::max(a.x, double(c));
    const double x1 = std::min(b.x, double(c) + 1.0);
    if (x0 > x1) continue;
    rows_between(y_at(x0), y_at(x1), c);
  }
  return out;
}

RoadMask rasterize_roads(std::span<const Polyline> polylines, const GridSpec& grid, int buffer_cells) {
  grid.validate();
  if (buffer_cells < 0) throw PreconditionError("rasterize_roads: buffer_cells must be >= 0");
  if (polylines.empty()) {
    std::cerr << "warning: no road segments; road mask is empty\n";
    return RoadMask(grid);
  }

  // padded by the buffer so segments just outside the grid still dilate into it
  const std::int32_t pad = buffer_cells;
  const std::int32_t rows = grid.n_rows + 2 * pad;
  const std::int32_t cols = grid.n_cols + 2 * pad;
  std::vector<std::uint8_t> touched(std::size_t(rows) * std::size_t(cols), 0);
  auto at = [&](std::vector<std::uint8_t>& v, std::int32_t r, std::int32_t c) -> std::uint8_t& {
    return v[std::size_t(r) * std::size_t(cols) + std::size_t(c)];
  };
  auto mark = [&](Cell c) {
    const std::int32_t r = c.row + pad;
    const std::int32_t k = c.col + pad;
    if (r >= 0 && k >= 0 && r < rows && k < cols) at(touched, r, k) = 1;
  };
  const CellWindow window{-pad - 1, grid.n_rows + pad, -pad - 1, grid.n_cols + pad};
  auto to_cells = [&](const GeoPoint& g) {
    const Point p = project_to_meters(g.lon, g.lat, grid);
    return Point{p.x / grid.cell_size, p.y / grid.cell_size};
  };
  for (const auto& line : polylines) {
    if (line.size() == 1) {
      const Point p = to_cells(line.front());
      for (const Cell c : supercover(p, p, window)) mark(c);
    }
    for (std::size_t i = 1; i < line.size(); ++i)
      for (const Cell c : supercover(to_cells(line[i - 1]), to_cells(line[i]), window)) mark(c);
  }

  if (buffer_cells > 0) {
    // separable Chebyshev dilation, rows then columns
    const std::int32_t b = buffer_cells;
    std::vector<std::uint8_t> tmp(touched.size(), 0);
    for (std::int32_t r = 0; r < rows; ++r) {
      std::int32_t last = -1'000'000'000;
      for (std::int32_t c = 0; c < cols + b; ++c) {
        if (c < cols && at(touched, r, c)) last = c;
        const std::int32_t target = c - b;
        if (target >= 0 && last >= target - b) at(tmp, r, target) = 1;
      }
    }
    std::fill(touched.begin(), touched.end(), 0);
    for (std::int32_t c = 0; c < cols; ++c) {
      std::int32_t last = -1'000'000'000;
      for (std::int32_t r = 0; r < rows + b; ++r) {
        if (r < rows && at(tmp, r, c)) last = r;
        const std::int32_t target = r - b;
        if (target >= 0 && last >= target - b) at(touched, target, c) = 1;
      }
    }
  }

  std::vector<Cell> cells;
  for (std::int32_t r = 0; r < grid.n_rows; ++r)
    for (std::int32_t c = 0; c < grid.n_cols; ++c)
      if (at(touched, r + pad, c + pad)) cells.push_back({r, c});
  return RoadMask(grid, std::move(cells));
}

}  // namespace hotspots
