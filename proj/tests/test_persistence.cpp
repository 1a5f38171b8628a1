#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "hgtop/error.hpp"
#include "hgtop/persistence.hpp"
#include "oracles.hpp"

using namespace hgtop;

namespace {

const std::vector<Point> kUnitSquare = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};

std::vector<oracle::Bar> bars_of(const PersistenceDiagram& d, std::size_t dim) {
  std::vector<oracle::Bar> out;
  for (const auto& b : d.bars(dim)) out.emplace_back(b.birth, b.death);
  return out;
}

// Diagrams on a dyadic grid so that every sum of costs is exact.
PersistenceDiagram random_diagram(std::mt19937_64& rng, std::size_t max_points) {
  std::uniform_int_distribution<std::size_t> count(0, max_points);
  std::uniform_int_distribution<int> birth(0, 64), length(1, 48);
  PersistenceDiagram d(1);
  const auto n = count(rng);
  for (std::size_t i = 0; i < n; ++i) {
    const double b = birth(rng) / 8.0;
    d.add(0, {b, b + length(rng) / 8.0});
  }
  return d;
}

SimplicialComplex final_complex(const Filtration& f) {
  std::vector<Simplex> simplices;
  for (const auto& e : f.entries) simplices.push_back(e.vertices);
  return SimplicialComplex::from_simplices(simplices);
}

}  // namespace

TEST_CASE("Rips filtration of two points") {
  auto f = vietoris_rips(std::vector<Point>{{0.0}, {1.0}}, 2.0, 0);
  REQUIRE(f.entries.size() == 3);
  CHECK(f.entries[0] == FiltrationEntry{{0}, 0.0});
  CHECK(f.entries[1] == FiltrationEntry{{1}, 0.0});
  CHECK(f.entries[2] == FiltrationEntry{{0, 1}, 1.0});

  auto d = barcode(f);
  REQUIRE(d.bars(0).size() == 2);
  CHECK(d.bars(0)[0] == PersistencePair{0.0, 1.0});
  CHECK(d.bars(0)[1] == PersistencePair{0.0, kInfinity});
}

TEST_CASE("Rips filtration of the unit square") {
  auto f = vietoris_rips(kUnitSquare, 2.0, 1);
  // Brute-force pairwise distances: four sides at 1, two diagonals at sqrt 2;
  // every triangle contains a diagonal.
  int sides = 0, diagonals = 0, triangles = 0;
  for (const auto& e : f.entries) {
    if (e.vertices.size() == 2) {
      if (e.birth == 1.0) ++sides;
      if (e.birth == std::sqrt(2.0)) ++diagonals;
    }
    if (e.vertices.size() == 3) {
      CHECK(e.birth == std::sqrt(2.0));
      ++triangles;
    }
  }
  CHECK(sides == 4);
  CHECK(diagonals == 2);
  CHECK(triangles == 4);
  CHECK(f.entries.size() == 4 + 6 + 4);

  auto d = barcode(f);
  REQUIRE(d.bars(1).size() == 1);
  CHECK(d.bars(1)[0].birth == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.bars(1)[0].death == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(d.bars(0).size() == 4);
  CHECK(d.infinite_count(0) == 1);
}

TEST_CASE("Rips filtration of one point and argument errors") {
  auto f = vietoris_rips(std::vector<Point>{{3.0, 4.0}}, 1.0, 1);
  REQUIRE(f.entries.size() == 1);
  CHECK(barcode(f).bars(0) == std::vector<PersistencePair>{{0.0, kInfinity}});
  CHECK_THROWS_AS(vietoris_rips(std::vector<Point>{{0.0}, {1.0, 2.0}}, 1.0, 1), Error);
  CHECK_THROWS_AS(vietoris_rips(std::vector<Point>{}, 1.0, 1), Error);
  CHECK_THROWS_AS(vietoris_rips(std::vector<Point>{{0.0}}, 0.0, 1), Error);
}

TEST_CASE("Rips respects max_eps") {
  auto f = vietoris_rips(std::vector<Point>{{0.0}, {1.0}, {5.0}}, 2.0, 1);
  CHECK(f.entries.size() == 4);
  auto d = barcode(f);
  CHECK(d.infinite_count(0) == 2);
}

TEST_CASE("hand reduction of a hollow triangle filled late") {
  // Columns: a b c | ab ac bc | abc. Reduction: ab -> low b, ac -> low c,
  // bc = b + c reduces by ab then ac to zero (cycle born at 1), abc -> low bc.
  Filtration f;
  f.homology_dim = 1;
  f.entries = {{{0}, 0}, {{1}, 0}, {{2}, 0}, {{0, 1}, 1}, {{0, 2}, 1}, {{1, 2}, 1}, {{0, 1, 2}, 2.5}};
  auto d = barcode(f);
  CHECK(d.bars(0) == std::vector<PersistencePair>{{0, 1}, {0, 1}, {0, kInfinity}});
  CHECK(d.bars(1) == std::vector<PersistencePair>{{1, 2.5}});
}

TEST_CASE("barcode rejects invalid filtrations") {
  Filtration late_face;
  late_face.entries = {{{0}, 0}, {{0, 1}, 1}, {{1}, 0}};
  CHECK_THROWS_AS(barcode(late_face), Error);
  Filtration late_birth;
  late_birth.entries = {{{0}, 0}, {{1}, 2}, {{0, 1}, 1}};
  CHECK_THROWS_AS(barcode(late_birth), Error);
  Filtration unsorted;
  unsorted.entries = {{{1, 0}, 0}};
  CHECK_THROWS_AS(barcode(unsorted), Error);
}

TEST_CASE("infinite bars count the Betti numbers of the final complex") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  std::uniform_int_distribution<int> count(1, 8);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<Point> pts(static_cast<std::size_t>(count(rng)));
    for (auto& p : pts) p = {coord(rng), coord(rng)};
    const double eps = 0.2 + coord(rng);
    auto f = vietoris_rips(pts, eps, 1);
    auto d = barcode(f);
    auto b = betti(final_complex(f), 1).betti;
    CHECK(d.infinite_count(0) == b[0]);
    CHECK(d.infinite_count(1) == b[1]);
  }
}

TEST_CASE("barcode is invariant under reordering equal-birth simplices") {
  std::mt19937_64 rng(47);
  std::uniform_int_distribution<int> grid(0, 3);
  for (int trial = 0; trial < 30; ++trial) {
    // Integer grid coordinates produce many tied distances.
    std::vector<Point> pts(7);
    for (auto& p : pts) p = {double(grid(rng)), double(grid(rng))};
    auto f = vietoris_rips(pts, 10.0, 1);
    const auto reference = barcode(f);
    for (int shuffle = 0; shuffle < 5; ++shuffle) {
      auto g = f;
      // Shuffle within runs of equal (birth, dimension).
      auto it = g.entries.begin();
      while (it != g.entries.end()) {
        auto end = std::find_if(it, g.entries.end(), [&](const FiltrationEntry& e) {
          return e.birth != it->birth || e.vertices.size() != it->vertices.size();
        });
        std::shuffle(it, end, rng);
        it = end;
      }
      CHECK(barcode(g) == reference);
    }
  }
}

TEST_CASE("diagram bookkeeping") {
  PersistenceDiagram d;
  d.add(0, {1.0, 1.0});
  CHECK(d.bars(0).empty());
  d.add(1, {0.5, kInfinity});
  d.add(1, {0.2, 0.7});
  CHECK(d.bars(1) == std::vector<PersistencePair>{{0.2, 0.7}, {0.5, kInfinity}});
  auto t = d.truncated(0.6);
  CHECK(t.bars(1) == std::vector<PersistencePair>{{0.2, 0.6}, {0.5, 0.6}});
  CHECK(d.truncated(0.5).bars(1) == std::vector<PersistencePair>{{0.2, 0.5}});
}

TEST_CASE("diagram CSV round trip") {
  auto d = barcode(vietoris_rips(kUnitSquare, 2.0, 1));
  std::ostringstream out;
  write_diagram(out, d);
  CHECK(out.str() ==
        "dim,birth,death\n0,0,1\n0,0,1\n0,0,1\n0,0,inf\n1,1,1.4142135623730951\n");
  std::istringstream in(out.str());
  CHECK(read_diagram(in) == d);
}

TEST_CASE("Wasserstein basics") {
  PersistenceDiagram a(1), b(1), empty(1);
  a.add(0, {0, 2});
  b.add(0, {0, 3});
  CHECK(wasserstein(a, a, 0) == 0.0);
  CHECK(wasserstein(a, empty, 0) == 1.0);
  // Matching directly costs 1; both to the diagonal costs 1 + 1.5.
  CHECK(wasserstein(a, b, 0) == 1.0);
  CHECK(wasserstein(empty, empty, 0) == 0.0);
  CHECK(wasserstein(a, b, 3) == 0.0);

  PersistenceDiagram inf(1);
  inf.add(0, {0, kInfinity});
  CHECK_THROWS_AS(wasserstein(inf, a, 0), Error);
  CHECK_THROWS_AS(wasserstein(a, b, 0, 0.5), Error);
}

TEST_CASE("Hungarian assignment on a known matrix") {
  std::vector<std::vector<double>> cost = {{4, 1, 3}, {2, 0, 5}, {3, 2, 2}};
  auto a = hungarian_assignment(cost);
  double total = 0;
  for (std::size_t i = 0; i < 3; ++i) total += cost[i][a[i]];
  CHECK(total == 5.0);
}

TEST_CASE("Wasserstein equals exhaustive matching on random diagrams") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 100; ++trial) {
    auto a = random_diagram(rng, 6);
    auto b = random_diagram(rng, 6);
    CHECK(wasserstein(a, b, 0) == oracle::wasserstein(bars_of(a, 0), bars_of(b, 0), 1.0));
    const double w2 = wasserstein(a, b, 0, 2.0);
    CHECK(w2 == doctest::Approx(oracle::wasserstein(bars_of(a, 0), bars_of(b, 0), 2.0)).epsilon(1e-12));
  }
}

TEST_CASE("Wasserstein metric axioms") {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 100; ++trial) {
    auto a = random_diagram(rng, 6);
    auto b = random_diagram(rng, 6);
    auto c = random_diagram(rng, 6);
    const double ab = wasserstein(a, b, 0), ba = wasserstein(b, a, 0);
    const double bc = wasserstein(b, c, 0), ac = wasserstein(a, c, 0);
    CHECK(ab >= 0.0);
    CHECK(std::abs(ab - ba) <= 1e-12);
    CHECK(wasserstein(a, a, 0) == 0.0);
    CHECK((ab == 0.0) == (a == b));
    CHECK(ac <= ab + bc + 1e-12);
  }
}
