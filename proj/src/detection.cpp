#include "hotspots/detection.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iostream>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "hotspots/error.hpp"

namespace hotspots {

namespace {

// out[i] = max(in[i*stride] over the clipped window [i-r, i+r]), monotone deque.
void sliding_max(const std::uint32_t* in, std::uint32_t* out, std::size_t n, std::size_t stride, int r) {
  std::deque<std::size_t> window;
  const std::size_t rr = std::size_t(r);
  for (std::size_t i = 0; i < n + rr; ++i) {
    if (i < n) {
      while (!window.empty() && in[window.back() * stride] <= in[i * stride]) window.pop_back();
      window.push_back(i);
    }
    if (i >= rr) {
      const std::size_t target = i - rr;
      while (window.front() + rr < target) window.pop_front();
      out[target * stride] = in[window.front() * stride];
    }
  }
}

struct NeighborhoodMax {
  std::vector<std::uint32_t> row_max;   // max over the column window in the same row
  std::vector<std::uint32_t> full_max;  // max over the full square
};

NeighborhoodMax neighborhood_max(const DensityRaster& raster, int radius) {
  const auto& g = raster.grid();
  const std::size_t rows = std::size_t(g.n_rows), cols = std::size_t(g.n_cols);
  NeighborhoodMax nm;
  nm.row_max.resize(g.cell_count());
  nm.full_max.resize(g.cell_count());
  const auto* counts = raster.counts().data();
  for (std::size_t r = 0; r < rows; ++r)
    sliding_max(counts + r * cols, nm.row_max.data() + r * cols, cols, 1, radius);
  for (std::size_t c = 0; c < cols; ++c)
    sliding_max(nm.row_max.data() + c, nm.full_max.data() + c, rows, cols, radius);
  return nm;
}

std::uint32_t brute_neighborhood_max(const DensityRaster& raster, Cell center, int radius) {
  const auto& g = raster.grid();
  std::uint32_t best = 0;
  for (std::int32_t r = std::max(0, center.row - radius); r <= std::min(g.n_rows - 1, center.row + radius); ++r)
    for (std::int32_t c = std::max(0, center.col - radius); c <= std::min(g.n_cols - 1, center.col + radius); ++c)
      best = std::max(best, raster.count({r, c}));
  return best;
}

std::uint64_t neighborhood_sum(const DensityRaster& raster, Cell center, int radius) {
  const auto& g = raster.grid();
  std::uint64_t sum = 0;
  for (std::int32_t r = std::max(0, center.row - radius); r <= std::min(g.n_rows - 1, center.row + radius); ++r)
    for (std::int32_t c = std::max(0, center.col - radius); c <= std::min(g.n_cols - 1, center.col + radius); ++c)
      sum += raster.count({r, c});
  return sum;
}

}  // namespace

CellPointSet find_local_maxima(const DensityRaster& raster, int radius_cells) {
  if (radius_cells < 1) throw PreconditionError("find_local_maxima: radius_cells must be >= 1");
  const auto& g = raster.grid();
  const auto nm = neighborhood_max(raster, radius_cells);
  const auto counts = raster.counts();
  std::vector<Cell> maxima;
  for (std::int32_t r = 0; r < g.n_rows; ++r) {
    for (std::int32_t c = 0; c < g.n_cols; ++c) {
      const std::size_t i = g.linear({r, c});
      const std::uint32_t v = counts[i];
      if (v == 0 || v != nm.full_max[i]) continue;
      // an earlier cell (in row-major order) of the neighborhood reaching v disqualifies
      bool first = true;
      for (std::int32_t rr = std::max(0, r - radius_cells); rr < r && first; ++rr)
        if (nm.row_max[g.linear({rr, c})] == v) first = false;
      for (std::int32_t cc = std::max(0, c - radius_cells); cc < c && first; ++cc)
        if (counts[g.linear({r, cc})] == v) first = false;
      if (first) maxima.push_back({r, c});
    }
  }
  return CellPointSet(std::move(maxima));
}

std::size_t elbow_index(const std::vector<int>& xs, const std::vector<std::size_t>& ys) {
  if (xs.size() != ys.size()) throw PreconditionError("elbow: curve coordinates differ in length");
  if (xs.size() < 3) throw NoElbowError("elbow: need at least three radii");
  const auto n = xs.size() - 1;
  const std::int64_t dx = std::int64_t(xs[n]) - xs[0];
  const std::int64_t dy = std::int64_t(ys[n]) - std::int64_t(ys[0]);
  // |cross| is proportional to the perpendicular distance to the chord
  std::int64_t best = 0;
  std::size_t best_i = 0;
  for (std::size_t i = 0; i <= n; ++i) {
    const std::int64_t cross = dx * (std::int64_t(ys[i]) - std::int64_t(ys[0])) - dy * (std::int64_t(xs[i]) - xs[0]);
    const std::int64_t dist = cross < 0 ? -cross : cross;
    if (dist > best) {
      best = dist;
      best_i = i;
    }
  }
  if (best == 0) throw NoElbowError("elbow: curve has no point off the chord; set the radius manually");
  return best_i;
}

ElbowResult select_radius_elbow(const DensityRaster& raster, RadiusRange range) {
  const auto& g = raster.grid();
  const int limit = std::min(g.n_rows, g.n_cols) / 2;
  if (range.lo < 1 || range.hi < range.lo || range.hi > limit)
    throw PreconditionError("elbow: radius search range must lie within 1.." + std::to_string(limit));
  ElbowResult out;
  for (int r = range.lo; r <= range.hi; ++r) {
    out.radii.push_back(r);
    out.maxima_counts.push_back(find_local_maxima(raster, r).size());
  }
  out.radius = out.radii[elbow_index(out.radii, out.maxima_counts)];
  return out;
}

std::vector<Hotspot> reshape_neighborhoods(const CellPointSet& centers, const DensityRaster& raster,
                                           int radius_cells, const GravityOptions& gravity) {
  if (centers.empty()) throw PreconditionError("reshape_neighborhoods: no centers");
  if (radius_cells < 1) throw PreconditionError("reshape_neighborhoods: radius_cells must be >= 1");
  const auto& g = raster.grid();
  const double cs2 = g.cell_size * g.cell_size;

  std::vector<double> mass(centers.size());
  for (std::size_t k = 0; k < centers.size(); ++k) {
    const Cell c = centers[k];
    if (!g.contains(c)) throw InconsistentInputError("reshape_neighborhoods: center outside grid");
    const std::uint32_t v = raster.count(c);
    if (v == 0 || v < brute_neighborhood_max(raster, c, radius_cells))
      throw InconsistentInputError("reshape_neighborhoods: center (" + std::to_string(c.row) + ", " +
                                   std::to_string(c.col) + ") is not a local maximum");
    mass[k] = gravity.mass == GravityMass::CenterCount ? double(v)
                                                        : double(neighborhood_sum(raster, c, radius_cells));
  }

  struct Claim {
    std::size_t owner;
    double pull;
    std::int64_t d2;  // squared distance in cells
  };
  std::unordered_map<std::size_t, Claim> claims;
  for (std::size_t k = 0; k < centers.size(); ++k) {
    const Cell c = centers[k];
    for (std::int32_t r = std::max(0, c.row - radius_cells); r <= std::min(g.n_rows - 1, c.row + radius_cells); ++r) {
      for (std::int32_t q = std::max(0, c.col - radius_cells); q <= std::min(g.n_cols - 1, c.col + radius_cells); ++q) {
        if (raster.count({r, q}) == 0) continue;
        const std::int64_t dr = r - c.row, dc = q - c.col;
        const std::int64_t d2 = dr * dr + dc * dc;
        double pull = std::numeric_limits<double>::infinity();
        if (d2 > 0) {
          const double d2m = double(d2) * cs2;
          pull = mass[k] / (gravity.exponent == 2.0 ? d2m : std::pow(d2m, gravity.exponent / 2.0));
        }
        const Claim cand{k, pull, d2};
        auto [it, inserted] = claims.try_emplace(g.linear({r, q}), cand);
        if (inserted) continue;
        Claim& cur = it->second;
        const bool better = cand.pull > cur.pull ||
                            (cand.pull == cur.pull &&
                             (cand.d2 < cur.d2 || (cand.d2 == cur.d2 && centers[cand.owner] < centers[cur.owner])));
        if (better) cur = cand;
      }
    }
  }

  std::vector<Hotspot> out(centers.size());
  for (std::size_t k = 0; k < centers.size(); ++k) {
    out[k].id = k;
    out[k].center = centers[k];
  }
  for (const auto& [lin, claim] : claims) {
    const Cell cell = g.from_linear(lin);
    out[claim.owner].members.push_back(cell);
    out[claim.owner].stops += raster.count(cell);
  }
  for (auto& h : out) std::sort(h.members.begin(), h.members.end());
  return out;
}

double head_tail_threshold(const std::vector<std::uint64_t>& values) {
  if (values.empty()) throw PreconditionError("head/tail breaks: no values");
  std::vector<std::uint64_t> current = values;
  for (;;) {
    const double mean =
        double(std::accumulate(current.begin(), current.end(), std::uint64_t{0})) / double(current.size());
    std::vector<std::uint64_t> head;
    for (const auto v : current)
      if (double(v) > mean) head.push_back(v);
    if (head.size() >= 3 && double(head.size()) < 0.4 * double(current.size())) {
      current = std::move(head);
      continue;
    }
    return mean;
  }
}

ThresholdResult threshold_popular(std::vector<Hotspot> prelim, std::optional<std::uint64_t> min_stops) {
  if (prelim.empty()) throw PreconditionError("threshold_popular: no preliminary hotspots");
  ThresholdResult out;
  if (min_stops) {
    if (*min_stops == 0) throw PreconditionError("threshold_popular: min_stops must be positive");
    out.threshold = double(*min_stops);
  } else {
    std::vector<std::uint64_t> stops;
    stops.reserve(prelim.size());
    for (const auto& h : prelim) stops.push_back(h.stops);
    out.threshold = head_tail_threshold(stops);
  }
  for (auto& h : prelim)
    if (double(h.stops) >= out.threshold) out.hotspots.push_back(std::move(h));
  if (out.hotspots.empty()) std::cerr << "warning: no hotspot reaches the popularity threshold\n";
  return out;
}

DetectionResult detect(const DensityRaster& raster, const RoadMask* road_mask, const DetectionParams& params) {
  const auto& g = raster.grid();
  std::optional<DensityRaster> masked;
  if (road_mask) {
    if (!(road_mask->grid() == g)) throw PreconditionError("detect: road mask grid differs from raster grid");
    std::vector<std::uint32_t> counts(g.cell_count(), 0u);
    for (const Cell c : road_mask->cells()) counts[g.linear(c)] = raster.count(c);
    masked.emplace(g, std::move(counts));
  }
  const DensityRaster& work = masked ? *masked : raster;

  DetectionResult out;
  if (params.radius_cells) {
    if (*params.radius_cells < 1) throw PreconditionError("detect: radius must be >= 1");
    out.radius_cells = *params.radius_cells;
  }
  if (work.total() == 0) return out;

  if (!params.radius_cells) {
    out.elbow = select_radius_elbow(work, params.radius_search);
    out.radius_cells = out.elbow->radius;
  }
  const auto centers = find_local_maxima(work, out.radius_cells);
  auto prelim = reshape_neighborhoods(centers, work, out.radius_cells, params.gravity);
  out.preliminary_count = prelim.size();
  auto kept = threshold_popular(std::move(prelim), params.min_stops);
  out.min_stops = kept.threshold;
  out.hotspots = std::move(kept.hotspots);
  std::sort(out.hotspots.begin(), out.hotspots.end(),
            [](const Hotspot& a, const Hotspot& b) { return a.center < b.center; });
  for (std::size_t i = 0; i < out.hotspots.size(); ++i) out.hotspots[i].id = i;
  return out;
}

}  // namespace hotspots
