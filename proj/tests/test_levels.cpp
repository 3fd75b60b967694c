#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "hotspots/error.hpp"
#include "hotspots/levels.hpp"

using namespace hotspots;

namespace {

using Values = std::vector<std::uint64_t>;

std::vector<Values> level_values(const Values& v, const LevelPartition& p) {
  std::vector<Values> out;
  for (const auto& level : p.levels) {
    Values s;
    for (const auto i : level) s.push_back(v[i]);
    std::sort(s.rbegin(), s.rend());
    out.push_back(s);
  }
  return out;
}

// Loubar levels by the rank rule k/n > 1 - mean/max written in integers,
// then promoting ties with the smallest value taken.
std::vector<Values> loubar_oracle(Values v) {
  std::sort(v.begin(), v.end());
  std::vector<Values> out;
  while (!v.empty()) {
    const std::uint64_t n = v.size(), max = v.back();
    const std::uint64_t total = std::accumulate(v.begin(), v.end(), std::uint64_t{0});
    std::size_t first = v.size();
    for (std::uint64_t k = 1; k <= n; ++k)
      if (k * max + total > n * max) {
        first = std::size_t(k - 1);
        break;
      }
    while (first > 0 && v[first - 1] == v[first]) --first;
    Values level(v.begin() + std::ptrdiff_t(first), v.end());
    std::sort(level.rbegin(), level.rend());
    out.push_back(level);
    v.resize(first);
  }
  return out;
}

}  // namespace

TEST_CASE("Lorenz curve") {
  const Values eq{5, 5, 5, 5};
  for (const auto& [x, y] : lorenz_curve(eq).points) CHECK(y == doctest::Approx(x));

  const Values v{4, 1, 10, 3, 2};
  const auto c = lorenz_curve(v);
  const std::vector<std::pair<double, double>> want{{0, 0}, {0.2, 0.05}, {0.4, 0.15}, {0.6, 0.30}, {0.8, 0.50}, {1, 1}};
  REQUIRE(c.points.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    CHECK(c.points[i].first == doctest::Approx(want[i].first));
    CHECK(c.points[i].second == doctest::Approx(want[i].second));
  }
  CHECK(c.points.back() == std::pair<double, double>{1.0, 1.0});
  CHECK(c.is_convex());

  CHECK_THROWS_AS(lorenz_curve(Values{}), InputError);
  CHECK_THROWS_AS(lorenz_curve(Values{3, 0}), InputError);
}

TEST_CASE("Lorenz curves are convex and monotone") {
  std::mt19937_64 gen(31);
  for (int t = 0; t < 100; ++t) {
    Values v(1 + gen() % 50);
    for (auto& x : v) x = 1 + gen() % 1000;
    const auto c = lorenz_curve(v);
    CHECK(c.is_convex());
    for (std::size_t i = 1; i < c.points.size(); ++i) {
      CHECK(c.points[i].first >= c.points[i - 1].first);
      CHECK(c.points[i].second >= c.points[i - 1].second);
      CHECK(c.points[i].second <= c.points[i].first + 1e-12);
    }
  }
}

TEST_CASE("Loubar threshold") {
  CHECK(loubar_threshold(Values{5, 5, 5, 5}) == 0.0);
  CHECK(loubar_threshold(Values{1, 2, 3, 4, 10}) == doctest::Approx(0.6));
  CHECK(loubar_threshold(Values{1, 1, 1, 1, 16}) == doctest::Approx(0.75));
}

TEST_CASE("Loubar levels: hand-derived partitions") {
  const Values eq{5, 5, 5, 5};
  const auto p1 = classify_values(eq);
  REQUIRE(p1.levels.size() == 1);
  CHECK(p1.levels[0].size() == 4);

  const Values v{1, 2, 3, 4, 10};
  const auto p = classify_values(v);
  CHECK(level_values(v, p) == std::vector<Values>{{10, 4}, {3, 2}, {1}});
  REQUIRE(p.thresholds.size() == 3);
  CHECK(p.thresholds[0] == doctest::Approx(0.6));
  CHECK(p.thresholds[1] == doctest::Approx(1.0 / 3.0));
  CHECK(p.thresholds[2] == 0.0);
}

TEST_CASE("Loubar levels: ties never straddle a boundary") {
  // top ceil(22/10) = 3 values would split the 3s; all of them are promoted
  const Values v{10, 3, 3, 3, 3};
  CHECK(level_values(v, classify_values(v)).front() == Values{10, 3, 3, 3, 3});
}

TEST_CASE("Loubar levels on random inputs") {
  std::mt19937_64 gen(32);
  for (int t = 0; t < 100; ++t) {
    Values v(1 + gen() % 80);
    const std::uint64_t range = t % 3 == 0 ? 5 : 10000;
    for (auto& x : v) x = 1 + gen() % range;
    const auto p = classify_values(v);
    CHECK(level_values(v, p) == loubar_oracle(v));

    std::set<std::size_t> seen;
    for (const auto& level : p.levels) {
      CHECK(!level.empty());
      for (const auto i : level) CHECK(seen.insert(i).second);
    }
    CHECK(seen.size() == v.size());
    const auto lv = level_values(v, p);
    for (std::size_t l = 1; l < lv.size(); ++l) CHECK(lv[l - 1].back() > lv[l].front());

    // scaling every value keeps the partition
    Values scaled = v;
    for (auto& x : scaled) x *= 7;
    CHECK(classify_values(scaled).levels == p.levels);
  }
}

TEST_CASE("level assignment and summary table") {
  std::vector<Hotspot> hs;
  const Values stops{1, 2, 3, 4, 10};
  for (std::size_t i = 0; i < stops.size(); ++i) hs.push_back({i, {0, int(i)}, {{0, int(i)}}, stops[i], {}});
  const auto p = classify_levels(hs);
  assign_levels(hs, p);
  CHECK(hs[4].level == 1);
  CHECK(hs[3].level == 1);
  CHECK(hs[2].level == 2);
  CHECK(hs[0].level == 3);
  const auto rows = summarize_levels(hs, p);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].hotspot_count == 2);
  CHECK(rows[0].stop_fraction_lo == 0.0);
  CHECK(rows[0].stop_fraction_hi == doctest::Approx(0.7));
  CHECK(rows[1].stop_fraction_hi == doctest::Approx(0.95));
  CHECK(rows[2].stop_fraction_hi == doctest::Approx(1.0));
  CHECK(rows[0].median_stops == 7.0);
  CHECK(rows[1].min_stops == 2);
  CHECK(rows[1].max_stops == 3);
}
