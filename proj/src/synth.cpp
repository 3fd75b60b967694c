#include "hotspots/synth.hpp"

#include <algorithm>
#include <cmath>

#include "hotspots/error.hpp"
#include "hotspots/point_index.hpp"
#include "hotspots/random.hpp"
#include "hotspots/weighted_sampler.hpp"

namespace hotspots {

namespace {

class CityBuilder {
 public:
  CityBuilder(const SyntheticCitySpec& spec, SyntheticCity& city)
      : spec_(spec), city_(city), g_(spec.grid), rng_(spec.seed), blocked_(g_.cell_count(), 0),
        inhibited_cells_(g_.cell_count(), 0) {}

  void build() {
    streets();
    first_level();
    for (std::size_t i = 0; i < spec_.level_multipliers.size(); ++i) next_level(int(i) + 2, spec_.level_multipliers[i]);
    scatter_stops();
  }

 private:
  double cs() const { return g_.cell_size; }
  double dist(Cell a, Cell b) const { return cell_distance(a, b, cs()); }
  bool free_road(Cell c) const {
    return city_.roads.contains(c) && !blocked_[g_.linear(c)] && !inhibited_cells_[g_.linear(c)];
  }

  void streets() {
    const int s = spec_.street_spacing_cells;
    std::vector<Cell> cells;
    for (std::int32_t r = 0; r < g_.n_rows; ++r)
      for (std::int32_t c = 0; c < g_.n_cols; ++c)
        if (r % s == 0 || c % s == 0) cells.push_back({r, c});
    city_.roads = RoadMask(g_, std::move(cells));
    for (std::int32_t r = 0; r < g_.n_rows; r += s)
      city_.road_lines.push_back({unproject(g_.center({r, 0}), g_), unproject(g_.center({r, g_.n_cols - 1}), g_)});
    for (std::int32_t c = 0; c < g_.n_cols; c += s)
      city_.road_lines.push_back({unproject(g_.center({0, c}), g_), unproject(g_.center({g_.n_rows - 1, c}), g_)});
  }

  int spacing() const {
    return spec_.spacing_cells > 0 ? spec_.spacing_cells : 3 * spec_.detection_radius_cells;
  }

  void place(Cell c, int level) {
    city_.truth.push_back({c, level, 0});
    const int sep = spacing();
    for (std::int32_t r = c.row - sep; r <= c.row + sep; ++r)
      for (std::int32_t q = c.col - sep; q <= c.col + sep; ++q)
        if (g_.contains({r, q})) blocked_[g_.linear({r, q})] = 1;
  }

  // road cells within `radius` meters of `center` that are still available
  std::vector<Cell> free_near(Cell center, double radius) const {
    std::vector<Cell> out;
    const auto h = static_cast<std::int32_t>(std::ceil(radius / cs()));
    for (std::int32_t r = center.row - h; r <= center.row + h; ++r)
      for (std::int32_t q = center.col - h; q <= center.col + h; ++q) {
        const Cell c{r, q};
        if (g_.contains(c) && free_road(c) && dist(c, center) <= radius) out.push_back(c);
      }
    return out;
  }

  void first_level() {
    const auto border = static_cast<std::int32_t>(std::ceil(spec_.border_m / cs()));
    std::vector<Cell> interior;
    for (const Cell c : city_.roads.cells())
      if (c.row >= border && c.col >= border && c.row < g_.n_rows - border && c.col < g_.n_cols - border)
        interior.push_back(c);
    if (interior.empty()) throw PreconditionError("synth: no road cells inside the border margin");

    std::vector<Cell> hubs;
    for (std::size_t k = 0; k < spec_.cluster_sizes.size(); ++k) {
      bool ok = false;
      for (int attempt = 0; attempt < 20000 && !ok; ++attempt) {
        const Cell c = interior[rng_.below(interior.size())];
        ok = std::all_of(hubs.begin(), hubs.end(), [&](Cell h) { return dist(c, h) >= spec_.cluster_separation_m; });
        if (ok) hubs.push_back(c);
      }
      if (!ok) throw PreconditionError("synth: cannot separate level-1 clusters; enlarge the grid or reduce clusters");
    }
    for (std::size_t k = 0; k < hubs.size(); ++k) {
      for (int a = 0; a < spec_.cluster_sizes[k]; ++a) {
        const auto options = free_near(hubs[k], spec_.cluster_radius_m);
        if (options.empty()) throw PreconditionError("synth: cluster radius too small for its anchors");
        place(options[rng_.below(options.size())], 1);
      }
    }
  }

  std::vector<Cell> level_centers(int level) const {
    std::vector<Cell> out;
    for (const auto& h : city_.truth)
      if (h.level == level) out.push_back(h.center);
    return out;
  }

  struct DenseDisc {
    Cell center;
    int children = 0;
  };

  std::vector<DenseDisc> dense_discs(const std::vector<Cell>& parents) const {
    std::vector<DenseDisc> discs;
    if (!spec_.inhibition.enabled) return discs;
    const PointIndex index(CellPointSet(parents), cs());
    for (const Cell p : parents)
      if (int(index.count_within(g_.center(p), spec_.inhibition.radius_m)) >= spec_.inhibition.dense_threshold)
        discs.push_back({p, 0});
    return discs;
  }

  // Records a placed child against the dense discs; returns the cells that
  // became unavailable because a disc reached its cap.
  std::vector<Cell> note_child(std::vector<DenseDisc>& discs, Cell child) {
    std::vector<Cell> closed;
    const double rad = spec_.inhibition.radius_m;
    for (auto& d : discs) {
      if (dist(child, d.center) >= rad) continue;
      if (++d.children != spec_.inhibition.cap) continue;
      const auto h = static_cast<std::int32_t>(std::ceil(rad / cs()));
      for (std::int32_t r = d.center.row - h; r <= d.center.row + h; ++r)
        for (std::int32_t q = d.center.col - h; q <= d.center.col + h; ++q) {
          const Cell c{r, q};
          if (g_.contains(c) && dist(c, d.center) < rad && !inhibited_cells_[g_.linear(c)]) {
            inhibited_cells_[g_.linear(c)] = 1;
            closed.push_back(c);
          }
        }
    }
    return closed;
  }

  void next_level(int level, double multiplier) {
    const auto parents = level_centers(level - 1);
    if (parents.empty()) return;
    std::fill(inhibited_cells_.begin(), inhibited_cells_.end(), 0);
    auto discs = dense_discs(parents);
    if (spec_.inhibition.enabled && spec_.inhibition.cap <= 0)
      for (auto& d : discs) {
        d.children = -1;
        spec_cap_zero(d);
      }

    std::vector<int> share(parents.size());
    for (std::size_t j = 0; j < parents.size(); ++j)
      share[j] = int(std::floor(double(j + 1) * multiplier)) - int(std::floor(double(j) * multiplier));

    if (spec_.placement == Placement::Spawn && spec_.accompany_decay_m > 0.0) {
      const double decay = spec_.accompany_decay_m;
      for (std::size_t j = 0; j < parents.size(); ++j) {
        for (int k = 0; k < share[j]; ++k) {
          const auto options = free_near(parents[j], 3.0 * decay);
          if (options.empty()) {
            ++city_.inhibited;
            continue;
          }
          std::vector<double> w;
          w.reserve(options.size());
          double total = 0.0;
          for (const Cell c : options) total += (w.emplace_back(std::exp(-dist(c, parents[j]) / decay)));
          double u = rng_.uniform() * total;
          std::size_t pick = 0;
          while (pick + 1 < options.size() && u >= w[pick]) u -= w[pick++];
          place(options[pick], level);
          note_child(discs, options[pick]);
        }
      }
      return;
    }

    // Knn, Uniform, or Spawn with an infinite kernel: draw from all free road cells
    std::size_t n = 0;
    for (const int s : share) n += std::size_t(s);
    std::vector<Cell> cand;
    for (const Cell c : city_.roads.cells())
      if (free_road(c)) cand.push_back(c);
    std::vector<double> weights(cand.size(), 1.0);
    if (spec_.placement == Placement::Knn) {
      const PointIndex index(CellPointSet(parents), cs());
      for (std::size_t i = 0; i < cand.size(); ++i) weights[i] = attraction(g_.center(cand[i]), index, spec_.planting);
    }
    WeightedSampler sampler(std::move(weights));
    auto drop = [&](Cell c) {
      const auto it = std::lower_bound(cand.begin(), cand.end(), c);
      if (it != cand.end() && *it == c) sampler.remove(std::size_t(it - cand.begin()));
    };
    const int sep = spacing();
    for (std::size_t k = 0; k < n; ++k) {
      if (sampler.positive_count() == 0) {
        if (spec_.inhibition.enabled) {
          city_.inhibited += n - k;
          return;
        }
        throw PreconditionError("synth: ran out of attractive road cells at level " + std::to_string(level));
      }
      const Cell c = cand[sampler.sample(rng_)];
      place(c, level);
      for (std::int32_t r = c.row - sep; r <= c.row + sep; ++r)
        for (std::int32_t q = c.col - sep; q <= c.col + sep; ++q) drop({r, q});
      for (const Cell closed : note_child(discs, c)) drop(closed);
    }
  }

  void spec_cap_zero(const DenseDisc& d) {
    const double rad = spec_.inhibition.radius_m;
    const auto h = static_cast<std::int32_t>(std::ceil(rad / cs()));
    for (std::int32_t r = d.center.row - h; r <= d.center.row + h; ++r)
      for (std::int32_t q = d.center.col - h; q <= d.center.col + h; ++q)
        if (g_.contains({r, q}) && dist({r, q}, d.center) < rad) inhibited_cells_[g_.linear({r, q})] = 1;
  }

  // the margin keeps projection round-off from moving a stop across a cell edge
  bool on_road(Point p) const {
    const double fx = p.x / cs() - std::floor(p.x / cs()), fy = p.y / cs() - std::floor(p.y / cs());
    if (fx < 0.05 || fx > 0.95 || fy < 0.05 || fy > 0.95) return false;
    const Cell cell{static_cast<std::int32_t>(std::floor(p.y / cs())), static_cast<std::int32_t>(std::floor(p.x / cs()))};
    return g_.contains(cell) && city_.roads.contains(cell);
  }

  void scatter_stops() {
    const double reach = (spec_.detection_radius_cells + 0.45) * cs();
    for (auto& h : city_.truth) {
      const std::size_t li = std::min<std::size_t>(std::size_t(h.level - 1), spec_.stops_per_level.size() - 1);
      const std::uint32_t total = spec_.stops_per_level[li];
      const auto core = static_cast<std::uint32_t>(std::lround(spec_.core_fraction * total));
      const Point c = g_.center(h.center);
      for (std::uint32_t k = 0; k < total; ++k) {
        Point p;
        if (k < core) {
          // stay clear of the cell edges so projection round-off cannot move the stop
          p = {c.x + (rng_.uniform() - 0.5) * 0.9 * cs(), c.y + (rng_.uniform() - 0.5) * 0.9 * cs()};
        } else {
          // truncated to the footprint square so every stop stays in the planted
          // hotspot, and kept on the street network where vehicles actually stop
          do {
            p = {c.x + rng_.normal() * spec_.scatter_sigma_m, c.y + rng_.normal() * spec_.scatter_sigma_m};
          } while (std::abs(p.x - c.x) > reach || std::abs(p.y - c.y) > reach || !on_road(p));
        }
        city_.stops.push_back(unproject(p, g_));
      }
      h.stops = total;
    }
    const auto roads = city_.roads.cells();
    for (std::size_t k = 0; k < spec_.noise_stops && !roads.empty(); ++k) {
      const Point c = g_.center(roads[rng_.below(roads.size())]);
      city_.stops.push_back(
          unproject({c.x + (rng_.uniform() - 0.5) * 0.9 * cs(), c.y + (rng_.uniform() - 0.5) * 0.9 * cs()}, g_));
    }
  }

  const SyntheticCitySpec& spec_;
  SyntheticCity& city_;
  GridSpec g_;
  Rng rng_;
  std::vector<std::uint8_t> blocked_;
  std::vector<std::uint8_t> inhibited_cells_;
};

}  // namespace

std::vector<CellPointSet> SyntheticCity::levels() const {
  int max_level = 0;
  for (const auto& h : truth) max_level = std::max(max_level, h.level);
  std::vector<std::vector<Cell>> grouped(static_cast<std::size_t>(max_level));
  for (const auto& h : truth) grouped[std::size_t(h.level - 1)].push_back(h.center);
  std::vector<CellPointSet> out;
  for (auto& g : grouped) {
    std::sort(g.begin(), g.end());
    out.emplace_back(std::move(g));
  }
  return out;
}

SyntheticCity synth_city(const SyntheticCitySpec& spec) {
  spec.grid.validate();
  if (spec.street_spacing_cells < 1) throw PreconditionError("synth: street spacing must be >= 1");
  if (spec.detection_radius_cells < 1) throw PreconditionError("synth: detection radius must be >= 1");
  if (spec.cluster_sizes.empty()) throw PreconditionError("synth: need at least one level-1 cluster");
  if (spec.stops_per_level.empty()) throw PreconditionError("synth: stops_per_level is empty");
  if (!(spec.core_fraction >= 0.0 && spec.core_fraction <= 1.0))
    throw PreconditionError("synth: core_fraction must lie in [0, 1]");
  for (const double m : spec.level_multipliers)
    if (!(m > 0.0)) throw PreconditionError("synth: level multipliers must be positive");
  if (spec.placement == Placement::Knn) spec.planting.validate();

  SyntheticCity city{spec.grid, RoadMask(spec.grid), {}, {}, {}, 0};
  CityBuilder(spec, city).build();
  return city;
}

}  // namespace hotspots
