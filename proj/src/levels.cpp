#include "hotspots/levels.hpp"

#include <algorithm>
#include <numeric>

#include "hotspots/error.hpp"

namespace hotspots {

namespace {

void check_positive(std::span<const std::uint64_t> values) {
  if (values.empty()) throw InputError("Lorenz curve: no values");
  for (const auto v : values)
    if (v == 0) throw InputError("Lorenz curve: values must be positive");
}

}  // namespace

bool LorenzCurve::is_convex() const {
  double prev = -1.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double dx = points[i].first - points[i - 1].first;
    const double slope = (points[i].second - points[i - 1].second) / dx;
    if (slope + 1e-12 < prev) return false;
    prev = slope;
  }
  return true;
}

LorenzCurve lorenz_curve(std::span<const std::uint64_t> values) {
  check_positive(values);
  std::vector<std::uint64_t> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = double(sorted.size());
  const double total = double(std::accumulate(sorted.begin(), sorted.end(), std::uint64_t{0}));
  LorenzCurve curve;
  curve.points.reserve(sorted.size() + 1);
  curve.points.emplace_back(0.0, 0.0);
  std::uint64_t partial = 0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    partial += sorted[k];
    curve.points.emplace_back(double(k + 1) / n, double(partial) / total);
  }
  curve.points.back() = {1.0, 1.0};
  return curve;
}

double loubar_threshold(std::span<const std::uint64_t> values) {
  check_positive(values);
  const auto total = std::accumulate(values.begin(), values.end(), std::uint64_t{0});
  const auto max = *std::max_element(values.begin(), values.end());
  const double mean = double(total) / double(values.size());
  return 1.0 - mean / double(max);
}

LevelPartition classify_values(std::span<const std::uint64_t> values) {
  check_positive(values);
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  // descending by value, position breaks ties so output is canonical
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });

  LevelPartition out;
  std::size_t start = 0;
  std::uint64_t remaining_total = std::accumulate(values.begin(), values.end(), std::uint64_t{0});
  while (start < order.size()) {
    const std::size_t n = order.size() - start;
    const std::uint64_t max = values[order[start]];
    std::vector<std::uint64_t> rest;
    rest.reserve(n);
    for (std::size_t i = start; i < order.size(); ++i) rest.push_back(values[order[i]]);
    out.thresholds.push_back(loubar_threshold(rest));

    // ranks k with k/n > 1 - mean/max  <=>  (n - k) * max < total
    std::size_t take = std::size_t((remaining_total + max - 1) / max);
    take = std::min(take, n);
    const std::uint64_t smallest = values[order[start + take - 1]];
    while (start + take < order.size() && values[order[start + take]] == smallest) ++take;

    std::vector<std::size_t> level(order.begin() + std::ptrdiff_t(start), order.begin() + std::ptrdiff_t(start + take));
    std::sort(level.begin(), level.end());
    for (const auto i : level) remaining_total -= values[i];
    out.levels.push_back(std::move(level));
    start += take;
  }
  return out;
}

LevelPartition classify_levels(std::span<const Hotspot> hotspots) {
  std::vector<std::uint64_t> stops;
  stops.reserve(hotspots.size());
  for (const auto& h : hotspots) stops.push_back(h.stops);
  return classify_values(stops);
}

void assign_levels(std::span<Hotspot> hotspots, const LevelPartition& partition) {
  for (std::size_t l = 0; l < partition.levels.size(); ++l)
    for (const auto i : partition.levels[l]) hotspots[i].level = int(l) + 1;
}

std::vector<LevelSummary> summarize_levels(std::span<const Hotspot> hotspots, const LevelPartition& partition) {
  std::uint64_t total = 0;
  for (const auto& h : hotspots) total += h.stops;
  std::vector<LevelSummary> rows;
  std::uint64_t cumulative = 0;
  for (std::size_t l = 0; l < partition.levels.size(); ++l) {
    std::vector<std::uint64_t> s;
    for (const auto i : partition.levels[l]) s.push_back(hotspots[i].stops);
    std::sort(s.begin(), s.end());
    LevelSummary row;
    row.level = int(l) + 1;
    row.hotspot_count = s.size();
    row.stop_fraction_lo = total ? double(cumulative) / double(total) : 0.0;
    cumulative += std::accumulate(s.begin(), s.end(), std::uint64_t{0});
    row.stop_fraction_hi = total ? double(cumulative) / double(total) : 0.0;
    row.max_stops = s.back();
    row.min_stops = s.front();
    const std::size_t m = s.size();
    row.median_stops = m % 2 ? double(s[m / 2]) : 0.5 * (double(s[m / 2 - 1]) + double(s[m / 2]));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace hotspots
