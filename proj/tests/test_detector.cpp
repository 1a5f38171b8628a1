#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "hgtop/detector.hpp"
#include "hgtop/error.hpp"

using namespace hgtop;

namespace {

Ipv4 ip(const char* s) { return *Ipv4::parse(s); }

SessionRecord session(const char* client, std::uint16_t port) {
  SessionRecord s;
  s.client_ip = ip(client);
  s.server_ip = ip("10.9.9.9");
  s.client_port = 50000;
  s.server_port = port;
  return s;
}

std::vector<FeatureVector> random_vectors(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<FeatureVector> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].window_start = static_cast<double>(i);
    for (std::size_t k = 0; k < dim; ++k) out[i].values.push_back(g(rng));
  }
  return out;
}

DetectorParams params(std::size_t capacity, double max_eps = 10.0) {
  DetectorParams p;
  p.capacity = capacity;
  p.max_eps = max_eps;
  return p;
}

void check_coherent(const Baseline& b) {
  const std::vector<Point> cloud(b.points().begin(), b.points().end());
  CHECK(b.diagram() == barcode(vietoris_rips(cloud, b.params().max_eps, b.params().max_dim))
                           .truncated(b.params().max_eps));
}

}  // namespace

TEST_CASE("feature names round trip") {
  CHECK(default_features().size() == 10);
  for (auto f : default_features()) CHECK(feature_from_name(feature_name(f)) == f);
  CHECK(feature_name(Feature::n_unique_sip) == "n_unique_sIP");
  CHECK_FALSE(feature_from_name("bogus").has_value());
}

TEST_CASE("summarize_window examples") {
  CHECK(summarize_window(TimeWindow{5.0, 1.0, {}}) ==
        FeatureVector{5.0, std::vector<double>(10, 0.0)});

  TimeWindow three{0.0, 300.0,
                   {session("10.0.0.1", 80), session("10.0.0.2", 80), session("10.0.0.1", 22)}};
  // The order complex of a two-element chain is a single edge: one component, no loop.
  CHECK(summarize_window(three).values == std::vector<double>{3, 2, 2, 2, 1.5, 1, 1, 1, 0, 1});

  TimeWindow scan{0.0, 300.0, three.sessions};
  for (std::uint16_t p = 1; p <= 5; ++p) scan.sessions.push_back(session("10.0.0.1", p));
  const auto in_degree = static_cast<std::size_t>(Feature::max_ecp_in_degree);
  CHECK(summarize_window(scan).values[in_degree] > summarize_window(three).values[in_degree]);
}

TEST_CASE("summarize_window honours a custom feature list") {
  TimeWindow w{0.0, 1.0, {session("10.0.0.1", 80)}};
  const std::vector<Feature> fs = {Feature::max_support_multiplicity, Feature::n_records};
  CHECK(summarize_window(w, fs).values == std::vector<double>{1, 1});
}

TEST_CASE("feature CSV round trip and errors") {
  std::vector<std::string> names = {"a", "b"};
  std::vector<FeatureVector> rows = {{0, {1.5, 2}}, {300, {0.1, -3}}};
  std::ostringstream out;
  write_features(out, names, rows);
  CHECK(out.str() == "window_start,a,b\n0,1.5,2\n300,0.1,-3\n");
  std::istringstream in(out.str());
  auto [n2, r2] = read_features(in);
  CHECK(n2 == names);
  CHECK(r2 == rows);

  std::istringstream bad("window_start,a\n0,nan\n");
  CHECK_THROWS_AS(read_features(bad), ParseError);
  std::istringstream short_row("window_start,a,b\n0,1\n");
  CHECK_THROWS_AS(read_features(short_row), ParseError);
}

TEST_CASE("report JSON has a fixed key order") {
  AnomalyReport r{300, 0.5, 1.25, false, std::nullopt};
  CHECK(r.to_json() ==
        R"({"window_start":300.0,"score":0.5,"threshold":1.25,"anomalous":false,"attribution":null})");
  r.anomalous = true;
  r.attribution = "n_unique_dPort";
  CHECK(r.to_json().find(R"("attribution":"n_unique_dPort")") != std::string::npos);
}

TEST_CASE("quantile_of uses linear interpolation") {
  CHECK(quantile_of({3, 1, 2}, 1.0) == 3.0);
  CHECK(quantile_of({1, 2, 3, 4}, 0.5) == 2.5);
  CHECK(quantile_of({7}, 0.3) == 7.0);
  CHECK_THROWS_AS(quantile_of({}, 0.5), Error);
  CHECK_THROWS_AS(quantile_of({1.0}, 0.0), Error);
}

TEST_CASE("init rejects bad arguments") {
  std::mt19937_64 rng(1);
  auto v = random_vectors(rng, 2, 3);
  CHECK_THROWS_AS(Baseline::init(v, params(2)), Error);
  auto v5 = random_vectors(rng, 5, 3);
  CHECK_THROWS_AS(Baseline::init(v5, params(4)), Error);
  v5[2].values.pop_back();
  CHECK_THROWS_AS(Baseline::init(v5, params(5)), Error);
}

TEST_CASE("constant vectors standardize to the origin") {
  std::vector<FeatureVector> v(5, FeatureVector{0, {4.0, -2.0, 0.1}});
  auto b = Baseline::init(v, params(5));
  CHECK(b.scale() == std::vector<double>{1, 1, 1});
  for (const auto& p : b.points()) CHECK(p == Point{0, 0, 0});
  // Every point coincides, so all finite H0 pairs have zero persistence and
  // only the truncated essential class remains.
  CHECK(b.diagram().bars(0) == std::vector<PersistencePair>{{0.0, 10.0}});
  CHECK(b.diagram().bars(1).empty());
}

TEST_CASE("random baseline: coherence, connectivity, calibration") {
  std::mt19937_64 rng(11);
  auto v = random_vectors(rng, 20, 4);
  auto b = Baseline::init(v, params(20, 100.0));
  check_coherent(b);
  CHECK(b.points().size() == 20);

  const std::vector<Point> cloud(b.points().begin(), b.points().end());
  CHECK(barcode(vietoris_rips(cloud, 100.0, 1)).infinite_count(0) == 1);

  const double t = b.calibrate_threshold();
  CHECK(t > 0.0);
  CHECK(b.calibrate_threshold(1.0) >= t);

  // Leave-one-out scores recomputed here; none exceeds the threshold.
  std::vector<double> loo;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    std::vector<Point> rest;
    for (std::size_t j = 0; j < cloud.size(); ++j)
      if (j != i) rest.push_back(cloud[j]);
    auto reduced = b.diagram_of(rest);
    rest.push_back(cloud[i]);
    auto full = b.diagram_of(rest);
    const double s = wasserstein(full, reduced, 0) + wasserstein(full, reduced, 1);
    CHECK(s <= t);
    loo.push_back(s);
  }
  CHECK(b.calibrate_threshold(1.0) == 1.5 * *std::max_element(loo.begin(), loo.end()));
}

TEST_CASE("equal leave-one-out scores give 1.5 times that score") {
  // Three collinear-free points at mutual distance 1: each removal is symmetric.
  std::vector<FeatureVector> v = {{0, {0, 0}}, {1, {1, 0}}, {2, {0.5, std::sqrt(3.0) / 2}}};
  DetectorParams p = params(3, 50.0);
  auto b = Baseline::init(v, p);
  std::vector<double> loo;
  const std::vector<Point> cloud(b.points().begin(), b.points().end());
  for (std::size_t i = 0; i < 3; ++i) {
    std::vector<Point> rest;
    for (std::size_t j = 0; j < 3; ++j)
      if (j != i) rest.push_back(cloud[j]);
    auto reduced = b.diagram_of(rest);
    rest.push_back(cloud[i]);
    loo.push_back(wasserstein(b.diagram_of(rest), reduced, 0) +
                  wasserstein(b.diagram_of(rest), reduced, 1));
  }
  CHECK(loo[0] == doctest::Approx(loo[1]).epsilon(1e-12));
  CHECK(loo[1] == doctest::Approx(loo[2]).epsilon(1e-12));
  CHECK(b.calibrate_threshold(0.99) == doctest::Approx(1.5 * loo[0]).epsilon(1e-12));
}

TEST_CASE("score examples") {
  std::mt19937_64 rng(13);
  auto v = random_vectors(rng, 10, 3);
  const double max_eps = 8.0;
  auto b = Baseline::init(v, params(10, max_eps));

  // A duplicate only adds a zero-persistence pair.
  CHECK(b.score(v[3]) == 0.0);

  // Far away: one extra truncated bar [0, max_eps) matched to the diagonal.
  FeatureVector far{0, {1e6, 1e6, 1e6}};
  CHECK(b.score(far) == doctest::Approx(max_eps / 2).epsilon(1e-12));

  std::normal_distribution<double> g(0.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    FeatureVector x{0, {g(rng), g(rng), g(rng)}};
    CHECK(b.score(x) >= 0.0);
  }
}

TEST_CASE("step rotates on normal windows and freezes on anomalies") {
  std::mt19937_64 rng(17);
  auto v = random_vectors(rng, 6, 2);
  auto b = Baseline::init(v, params(6, 5.0));

  auto [r0, b0] = b.step(v[4], 0.0);
  CHECK_FALSE(r0.anomalous);
  CHECK(r0.score == 0.0);
  CHECK_FALSE(r0.attribution.has_value());
  REQUIRE(b0.points().size() == 6);
  for (std::size_t i = 0; i + 1 < 6; ++i) CHECK(b0.points()[i] == b.points()[i + 1]);
  CHECK(b0.points().back() == b.standardize(v[4]));
  check_coherent(b0);

  FeatureVector far{9, {1e3, 0}};
  auto [r1, b1] = b.step(far, 0.1);
  CHECK(r1.anomalous);
  CHECK(r1.score > r1.threshold);
  CHECK(r1.attribution == "x0");
  CHECK(b1 == b);
}

TEST_CASE("alternating stream keeps only normal vectors, oldest first") {
  std::mt19937_64 rng(19);
  auto v = random_vectors(rng, 5, 2);
  std::vector<std::string> names = {"a", "b"};
  auto b = Baseline::init(v, params(5, 5.0), names);
  const double threshold = b.calibrate_threshold();

  std::vector<Point> expected(b.points().begin(), b.points().end());
  std::uniform_real_distribution<double> jitter(-0.05, 0.05);
  for (int step = 0; step < 10; ++step) {
    FeatureVector x;
    x.window_start = 100.0 + step;
    const bool anomaly = step % 2 == 1;
    if (anomaly) {
      x.values = {0.0, 1e4};
    } else {
      // Near a current baseline point so the score stays tiny.
      const auto& base = v[static_cast<std::size_t>(step / 2) % v.size()].values;
      x.values = {base[0] + jitter(rng) * 1e-3, base[1] + jitter(rng) * 1e-3};
    }
    auto [report, next] = b.step(x, threshold);
    CHECK(report.anomalous == anomaly);
    CHECK(report.anomalous == (report.score > report.threshold));
    if (anomaly) {
      CHECK(report.attribution == "b");
      CHECK(next == b);
    } else {
      expected.erase(expected.begin());
      expected.push_back(b.standardize(x));
    }
    CHECK(next.points().size() == 5);
    CHECK(std::vector<Point>(next.points().begin(), next.points().end()) == expected);
    check_coherent(next);
    b = next;
  }
}

TEST_CASE("attribution examples") {
  std::mt19937_64 rng(23);
  auto v = random_vectors(rng, 8, 4);
  auto b = Baseline::init(v, params(8, 10.0));

  Point centroid(4, 0.0);
  for (const auto& p : b.points())
    for (std::size_t i = 0; i < 4; ++i) centroid[i] += p[i] / 8.0;
  auto raw = [&](const Point& z) {
    FeatureVector out{0, {}};
    for (std::size_t i = 0; i < 4; ++i) out.values.push_back(z[i] * b.scale()[i] + b.mean()[i]);
    return out;
  };

  for (std::size_t k = 0; k < 4; ++k) {
    Point z = centroid;
    z[k] += 6.0;
    CHECK(b.attribute(raw(z)) == k);
  }
  CHECK(b.attribute(raw(centroid)) == 0);
}

TEST_CASE("reports are deterministic") {
  std::mt19937_64 rng(29);
  auto v = random_vectors(rng, 12, 3);
  auto run = [&] {
    auto b = Baseline::init(std::span(v).first(6), params(6, 6.0));
    const double t = b.calibrate_threshold();
    std::string out;
    for (std::size_t i = 6; i < v.size(); ++i) {
      auto [r, next] = b.step(v[i], t);
      out += r.to_json() + "\n";
      b = next;
    }
    return out;
  };
  CHECK(run() == run());
}
