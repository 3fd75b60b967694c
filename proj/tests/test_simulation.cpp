#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "hotspots/error.hpp"
#include "hotspots/simulation.hpp"
#include "hotspots/weighted_sampler.hpp"
#include "oracles.hpp"

using namespace hotspots;

namespace {

constexpr double kCs = 10.0;

GridSpec grid(int rows, int cols) { return {0.0, 0.0, kCs, rows, cols, 0.0}; }

RoadMask full_roads(int rows, int cols) {
  std::vector<Cell> cells;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) cells.push_back({r, c});
  return RoadMask(grid(rows, cols), cells);
}

MechanismParams mech(Mechanism m, int k = 3, double alpha = 1.0, double d_cut = 1000.0) {
  MechanismParams p;
  p.mechanism = m;
  p.k = k;
  p.alpha = alpha;
  p.d_cut = d_cut;
  return p;
}

double attraction_oracle(Cell x, const std::vector<Cell>& h, const MechanismParams& p) {
  auto d = oracle::sorted_distances((x.col + 0.5) * kCs, (x.row + 0.5) * kCs, h, kCs);
  d.erase(std::remove_if(d.begin(), d.end(), [&](double v) { return v > p.d_cut; }), d.end());
  if (p.mechanism == Mechanism::Random) return d.empty() ? 0.0 : 1.0;
  if (p.mechanism == Mechanism::Knn && d.size() > std::size_t(p.k)) d.resize(std::size_t(p.k));
  double s = 0.0;
  for (const double v : d) s += std::pow(v, -p.alpha);
  return s;
}

double rmse_oracle(const std::vector<Cell>& o, const std::vector<Cell>& s, double d) {
  double sum = 0.0;
  for (const Cell& x : o) {
    const double px = (x.col + 0.5) * kCs, py = (x.row + 0.5) * kCs;
    const double diff = double(oracle::count_within(px, py, o, d, kCs)) - double(oracle::count_within(px, py, s, d, kCs));
    sum += diff * diff;
  }
  return std::sqrt(sum / double(o.size()));
}

int chebyshev(Cell a, Cell b) { return std::max(std::abs(a.row - b.row), std::abs(a.col - b.col)); }

}  // namespace

TEST_CASE("attraction: hand sums") {
  const Cell x{0, 0};
  CHECK(attraction(x, CellPointSet({{0, 10}}), mech(Mechanism::Knn, 1), kCs) == doctest::Approx(0.01));
  const CellPointSet two({{0, 10}, {0, 20}});
  CHECK(attraction(x, two, mech(Mechanism::Knn, 2), kCs) == doctest::Approx(0.015));
  CHECK(attraction(x, two, mech(Mechanism::Global, 3, 1.0, 150.0), kCs) == doctest::Approx(0.01));
  const CellPointSet far({{0, 150}});
  for (const auto m : {Mechanism::Knn, Mechanism::Global, Mechanism::Random})
    CHECK(attraction(x, far, mech(m), kCs) == 0.0);
  CHECK(attraction(x, two, mech(Mechanism::Random), kCs) == 1.0);
  CHECK_THROWS_AS(attraction({0, 10}, two, mech(Mechanism::Knn), kCs), SingularDistanceError);
  CHECK_THROWS_AS(attraction({0, 10}, two, mech(Mechanism::Global), kCs), SingularDistanceError);
}

TEST_CASE("attraction only sees the K nearest") {
  // both cells have their two nearest hotspots at 100 m; the farther ones differ
  const CellPointSet h({{50, 60}, {50, 40}, {50, 75}, {200, 210}, {210, 200}});
  const auto knn = mech(Mechanism::Knn, 2);
  const double a1 = attraction({50, 50}, h, knn, kCs);
  const double a2 = attraction({200, 200}, h, knn, kCs);
  CHECK(a1 == a2);
  CHECK(attraction({50, 50}, h, mech(Mechanism::Global), kCs) > a1);
}

TEST_CASE("attraction matches brute force and its ordering properties") {
  std::mt19937_64 gen(51);
  for (int t = 0; t < 100; ++t) {
    const auto cells = oracle::random_cells(gen, 2 + gen() % 120, 200, 200);
    const Cell x = cells.back();
    const std::vector<Cell> h(cells.begin(), cells.end() - 1);
    const CellPointSet hs(h);
    const double alpha = 0.5 + double(gen() % 20) / 10.0;
    const double d_cut = 200.0 + double(gen() % 1500);
    const int k = 1 + int(gen() % 5);
    for (const auto m : {Mechanism::Knn, Mechanism::Global, Mechanism::Random}) {
      const auto p = mech(m, k, alpha, d_cut);
      CHECK(attraction(x, hs, p, kCs) == doctest::Approx(attraction_oracle(x, h, p)).epsilon(1e-9));
    }
    const double knn = attraction(x, hs, mech(Mechanism::Knn, k, alpha, d_cut), kCs);
    CHECK(knn <= attraction(x, hs, mech(Mechanism::Global, k, alpha, d_cut), kCs) * (1 + 1e-12));

    // pushing one hotspot directly away from x never raises the pull
    std::vector<Cell> moved = h;
    Cell& y = moved[gen() % moved.size()];
    const int dr = y.row - x.row, dc = y.col - x.col;
    const Cell pushed{x.row + 2 * dr, x.col + 2 * dc};
    if (std::find(moved.begin(), moved.end(), pushed) == moved.end()) {
      y = pushed;
      for (const auto m : {Mechanism::Knn, Mechanism::Global}) {
        const auto p = mech(m, k, alpha, d_cut);
        CHECK(attraction(x, CellPointSet(moved), p, kCs) <= attraction(x, hs, p, kCs) * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("background split") {
  const std::vector<CellPointSet> near{CellPointSet({{0, 0}}), CellPointSet({{0, 10}, {10, 0}}),
                                       CellPointSet({{5, 5}})};
  auto b = background_split(near, 1000.0, kCs);
  REQUIRE(b.size() == 3);
  CHECK(b[0] == near[0]);
  CHECK(b[1].empty());
  CHECK(b[2].empty());

  const std::vector<CellPointSet> far{CellPointSet({{0, 0}}), CellPointSet({{0, 200}, {0, 10}})};
  b = background_split(far, 1000.0, kCs);
  CHECK(oracle::cells_of(b[1]) == std::vector<Cell>{{0, 200}});
}

TEST_CASE("background split matches brute force") {
  std::mt19937_64 gen(52);
  for (int t = 0; t < 100; ++t) {
    const auto cells = oracle::random_cells(gen, 40 + gen() % 100, 600, 600);
    std::vector<CellPointSet> levels;
    std::size_t at = 0;
    for (std::size_t n : {std::size_t(5), std::size_t(15), cells.size() - 20}) {
      levels.emplace_back(std::vector<Cell>(cells.begin() + long(at), cells.begin() + long(at + n)));
      at += n;
    }
    const double d_cut = 300.0 + double(gen() % 1200);
    const auto got = background_split(levels, d_cut, kCs);
    std::vector<Cell> reach = oracle::cells_of(levels[0]);
    for (std::size_t i = 1; i < levels.size(); ++i) {
      std::vector<Cell> want;
      for (const Cell c : levels[i])
        if (oracle::min_distance(c, reach, kCs) > d_cut) want.push_back(c);
      CHECK(oracle::cells_of(got[i]) == want);
      reach.insert(reach.end(), want.begin(), want.end());
    }
  }
}

TEST_CASE("weighted sampler") {
  WeightedSampler s({1.0, 0.0, 2.0, 1.0});
  CHECK(s.positive_count() == 3);
  Rng rng(1);
  std::vector<int> hits(4, 0);
  for (int i = 0; i < 40000; ++i) ++hits[s.sample(rng)];
  CHECK(hits[1] == 0);
  CHECK(double(hits[2]) / 40000.0 == doctest::Approx(0.5).epsilon(0.03));
  s.remove(2);
  s.remove(2);
  CHECK(s.positive_count() == 2);
  for (int i = 0; i < 1000; ++i) CHECK(s.sample(rng) != 2);
  s.remove(0);
  s.remove(3);
  CHECK_THROWS(s.sample(rng));
  CHECK_THROWS(WeightedSampler({1.0, -1.0}));
}

TEST_CASE("simulate one level") {
  const GridSpec g = grid(100, 100);
  const CellPointSet h({{50, 50}});
  const auto p = mech(Mechanism::Knn, 1);

  SUBCASE("zero picks") {
    CandidatePool pool(g, std::vector<Cell>{{50, 60}});
    CHECK(simulate_level(h, pool, 0, p, 1).empty());
  }
  SUBCASE("single candidate") {
    CandidatePool pool(g, std::vector<Cell>{{50, 60}});
    CHECK(oracle::cells_of(simulate_level(h, pool, 1, p, 1)) == std::vector<Cell>{{50, 60}});
    CHECK(pool.size() == 0);
  }
  SUBCASE("exhaustion reports the shortfall") {
    CandidatePool pool(g, std::vector<Cell>{{50, 60}, {50, 62}, {50, 80}});
    try {
      simulate_level(h, pool, 3, p, 1);
      FAIL("expected exhaustion");
    } catch (const ExhaustionError& e) {
      CHECK(e.shortfall() == 1);
    }
  }
  SUBCASE("zero total attraction is an error") {
    CandidatePool pool(g, std::vector<Cell>{{50, 60}, {0, 0}});
    CHECK_THROWS_AS(simulate_level(h, pool, 2, mech(Mechanism::Knn, 1, 1.0, 200.0), 1), ZeroAttractionError);
  }
  SUBCASE("candidates must not hold higher-level cells") {
    CandidatePool pool(g, std::vector<Cell>{{50, 50}, {50, 60}});
    CHECK_THROWS_AS(simulate_level(h, pool, 1, p, 1), PreconditionError);
  }
}

TEST_CASE("picks follow attraction 3:1") {
  // 100 m and 300 m from the only hotspot: pulls 1/100 and 1/300
  const GridSpec g = grid(100, 100);
  const CellPointSet h({{50, 50}});
  const auto p = mech(Mechanism::Knn, 1);
  const int n = 10000;
  int first = 0;
  for (int s = 0; s < n; ++s) {
    CandidatePool pool(g, std::vector<Cell>{{50, 60}, {50, 80}});
    if (simulate_level(h, pool, 1, p, derive_seed(99, std::uint64_t(s)))[0] == Cell{50, 60}) ++first;
  }
  const double sigma = std::sqrt(0.75 * 0.25 / n);
  CHECK(std::abs(double(first) / n - 0.75) <= 3 * sigma);
}

TEST_CASE("cascade contracts") {
  const RoadMask road = full_roads(150, 150);
  std::mt19937_64 gen(53);
  const auto cells = oracle::random_cells(gen, 100, 150, 150);
  const std::vector<CellPointSet> observed{CellPointSet({cells.begin(), cells.begin() + 10}),
                                           CellPointSet({cells.begin() + 10, cells.begin() + 40}),
                                           CellPointSet({cells.begin() + 40, cells.end()})};
  for (const auto m : {Mechanism::Knn, Mechanism::Global, Mechanism::Random}) {
    auto p = mech(m, 3, 1.0, 400.0);
    p.x_radius_cells = 2;
    const auto run = simulate_cascade(observed, road, p, 7);
    REQUIRE(run.complete);
    REQUIRE(run.levels.size() == 3);
    std::vector<Cell> earlier(observed[0].begin(), observed[0].end());
    for (std::size_t i = 1; i < 3; ++i) {
      const auto& rec = run.levels[i];
      CHECK(rec.simulated.size() == observed[i].size() - rec.background.size());
      CHECK(run.combined(i).size() == observed[i].size());
      const auto s = oracle::cells_of(rec.simulated);
      for (std::size_t a = 0; a < s.size(); ++a) {
        CHECK(road.contains(s[a]));
        for (std::size_t b = a + 1; b < s.size(); ++b) CHECK(chebyshev(s[a], s[b]) > p.x_radius_cells);
        CHECK(std::find(earlier.begin(), earlier.end(), s[a]) == earlier.end());
      }
      const auto h = run.combined(i);
      earlier.insert(earlier.end(), h.begin(), h.end());
    }
    const auto again = simulate_cascade(observed, road, p, 7);
    for (std::size_t i = 0; i < 3; ++i) CHECK(again.levels[i].simulated == run.levels[i].simulated);
  }
}

TEST_CASE("cascade with every lower hotspot out of reach") {
  const RoadMask road = full_roads(300, 300);
  const std::vector<CellPointSet> observed{CellPointSet({{0, 0}}), CellPointSet({{250, 250}, {280, 200}})};
  const auto run = simulate_cascade(observed, road, mech(Mechanism::Knn), 1);
  CHECK(run.complete);
  CHECK(run.levels[1].simulated.empty());
  CHECK(run.levels[1].background.size() == 2);
}

TEST_CASE("cascade that runs out of candidates ends early") {
  const RoadMask road(grid(10, 10), {{0, 0}, {0, 1}, {0, 2}, {0, 3}});
  const std::vector<CellPointSet> observed{CellPointSet({{0, 0}}), CellPointSet({{0, 2}, {0, 3}, {5, 5}})};
  const auto run = simulate_cascade(observed, road, mech(Mechanism::Knn), 1);
  CHECK(!run.complete);
  CHECK(run.failed_level == 2);
}

TEST_CASE("RMSE of neighbor counts") {
  std::mt19937_64 gen(54);
  for (int t = 0; t < 100; ++t) {
    const auto o = oracle::random_cells(gen, 1 + gen() % 100, 200, 200);
    const auto s = oracle::random_cells(gen, gen() % 100, 200, 200);
    const double d = 50.0 + double(gen() % 1000);
    CHECK(rmse_compare(CellPointSet(o), CellPointSet(s), d, kCs) == doctest::Approx(rmse_oracle(o, s, d)).epsilon(1e-9));
    CHECK(rmse_compare(CellPointSet(o), CellPointSet(o), d, kCs) == 0.0);
    CHECK(rmse_compare(CellPointSet(o), CellPointSet(), d, kCs) == doctest::Approx(rmse_oracle(o, {}, d)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(rmse_compare(CellPointSet(), CellPointSet(), 100.0, kCs), PreconditionError);
}

TEST_CASE("mechanism experiment") {
  const RoadMask road = full_roads(120, 120);
  std::mt19937_64 gen(55);
  const auto cells = oracle::random_cells(gen, 60, 120, 120);
  const std::vector<CellPointSet> observed{CellPointSet({cells.begin(), cells.begin() + 10}),
                                           CellPointSet({cells.begin() + 10, cells.end()})};
  ExperimentConfig cfg;
  cfg.params.x_radius_cells = 1;
  cfg.n_sims = 1;
  const auto one = mechanism_experiment(observed, road, cfg);
  REQUIRE(one.size() == 3);
  for (const auto& r : one) {
    REQUIRE(r.levels.size() == 1);
    CHECK(r.levels[0].band.q10 == r.levels[0].band.q90);
  }

  cfg.n_sims = 12;
  cfg.threads = 1;
  const auto serial = mechanism_experiment(observed, road, cfg);
  cfg.threads = 3;
  const auto threaded = mechanism_experiment(observed, road, cfg);
  for (std::size_t m = 0; m < 3; ++m) {
    CHECK(serial[m].levels[0].band.q50 == threaded[m].levels[0].band.q50);
    CHECK(serial[m].complete_runs == 12);
  }
  const std::vector<CellPointSet> single{observed[0]};
  CHECK_THROWS_AS(mechanism_experiment(single, road, cfg), PreconditionError);
}

TEST_CASE("seed derivation and draws are stable") {
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  CHECK(derive_seed(1, 2) != derive_seed(2, 1));
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) CHECK(a.below(7) == b.below(7));
  const auto s = sample_without_replacement(10, 10, a);
  CHECK(std::set<std::size_t>(s.begin(), s.end()).size() == 10);
}
