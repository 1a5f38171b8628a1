#include <random>
#include <sstream>

#include "doctest.h"
#include "hgtop/error.hpp"
#include "hgtop/ingest.hpp"
#include "oracles.hpp"

using namespace hgtop;

namespace {

Ipv4 ip(const char* s) { return *Ipv4::parse(s); }

std::string with_header(const std::string& body) {
  return std::string(kFlowHeader) + "\n" + body;
}

}  // namespace

TEST_CASE("Ipv4 parses dotted quads and rejects the rest") {
  CHECK(Ipv4::parse("10.0.0.1")->bits == 0x0A000001u);
  CHECK(Ipv4::parse("255.255.255.255")->str() == "255.255.255.255");
  CHECK_FALSE(Ipv4::parse("256.0.0.1"));
  CHECK_FALSE(Ipv4::parse("10.0.0"));
  CHECK_FALSE(Ipv4::parse("10.0.0.1.2"));
  CHECK_FALSE(Ipv4::parse("10..0.1"));
  CHECK_FALSE(Ipv4::parse("a.b.c.d"));
}

TEST_CASE("parse_flows maps fields directly") {
  auto recs = parse_flows(with_header("100.0,101.2,10.0.0.1,10.0.0.2,51515,80,S\n"));
  REQUIRE(recs.size() == 1);
  const FlowRecord expected{100.0, 101.2, ip("10.0.0.1"), ip("10.0.0.2"), 51515, 80, "S"};
  CHECK(recs[0] == expected);
}

TEST_CASE("parse_flows on header-only input is empty") {
  CHECK(parse_flows(with_header("")).empty());
  CHECK(parse_flows(std::string(kFlowHeader)).empty());
}

TEST_CASE("parse_flows errors name the line and field") {
  SUBCASE("port out of range") {
    try {
      parse_flows(with_header("1,2,10.0.0.1,10.0.0.2,80,443,S\n1,2,10.0.0.1,10.0.0.2,70000,80,S\n"));
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
      CHECK(e.field() == "sPort");
    }
  }
  SUBCASE("bad header") {
    CHECK_THROWS_AS(parse_flows("stime,etime,sip,dip,sport,dport,flags\n"), ParseError);
    CHECK_THROWS_AS(parse_flows(""), ParseError);
  }
  SUBCASE("end before start") {
    try {
      parse_flows(with_header("5,4,10.0.0.1,10.0.0.2,1,2,S\n"));
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.field() == "eTime");
    }
  }
  SUBCASE("bad address and field count") {
    CHECK_THROWS_AS(parse_flows(with_header("1,2,10.0.0,10.0.0.2,1,2,S\n")), ParseError);
    CHECK_THROWS_AS(parse_flows(with_header("1,2,10.0.0.1,10.0.0.2,1,2\n")), ParseError);
    CHECK_THROWS_AS(parse_flows(with_header("x,2,10.0.0.1,10.0.0.2,1,2,S\n")), ParseError);
  }
}

TEST_CASE("parse after write is the identity on random valid records") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> t(0.0, 1e9);
  std::uniform_int_distribution<std::uint32_t> addr;
  std::uniform_int_distribution<int> port(0, 65535);
  const char* flags[] = {"S", "SA", "FA", "", "PRSF"};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<FlowRecord> recs;
    for (int i = 0; i < 50; ++i) {
      double s = t(rng);
      double e = s + t(rng) * 1e-6;
      recs.push_back(FlowRecord{s, e, Ipv4{addr(rng)}, Ipv4{addr(rng)},
                                static_cast<std::uint16_t>(port(rng)),
                                static_cast<std::uint16_t>(port(rng)), flags[i % 5]});
    }
    std::ostringstream out;
    write_flows(out, recs);
    CHECK(parse_flows(out.str()) == recs);
  }
}

TEST_CASE("pair_bidirectional merges a request and its reply") {
  std::vector<FlowRecord> recs = {
      {100.0, 101.0, ip("10.0.0.1"), ip("10.0.0.2"), 51515, 80, "S"},
      {100.1, 100.9, ip("10.0.0.2"), ip("10.0.0.1"), 80, 51515, "SA"},
  };
  auto sessions = pair_bidirectional(recs);
  REQUIRE(sessions.size() == 1);
  CHECK(sessions[0].client_ip == ip("10.0.0.1"));
  CHECK(sessions[0].server_ip == ip("10.0.0.2"));
  CHECK(sessions[0].server_port == 80);
  CHECK(sessions[0].client_port == 51515);
  CHECK(sessions[0].constituent_count == 2);
  CHECK(sessions[0].start == 100.0);
  CHECK(sessions[0].end == 101.0);

  SUBCASE("input order does not matter") {
    std::swap(recs[0], recs[1]);
    CHECK(pair_bidirectional(recs) == sessions);
  }
}

TEST_CASE("pair_bidirectional keeps unmatched records as singletons") {
  std::vector<FlowRecord> recs = {{5.0, 6.0, ip("10.0.0.9"), ip("10.0.0.2"), 22, 40000, "S"}};
  auto sessions = pair_bidirectional(recs);
  REQUIRE(sessions.size() == 1);
  CHECK(sessions[0].constituent_count == 1);
  CHECK(sessions[0].client_ip == ip("10.0.0.9"));
  CHECK(sessions[0].client_port == 22);
}

TEST_CASE("pair_bidirectional does not merge disjoint intervals") {
  std::vector<FlowRecord> recs = {
      {0.0, 1.0, ip("10.0.0.1"), ip("10.0.0.2"), 50000, 80, "S"},
      {2.0, 3.0, ip("10.0.0.2"), ip("10.0.0.1"), 80, 50000, "SA"},
  };
  CHECK(pair_bidirectional(recs).size() == 2);
}

TEST_CASE("pair_bidirectional client tie-breaks") {
  SUBCASE("ephemeral port wins a simultaneous start") {
    std::vector<FlowRecord> recs = {
        {1.0, 2.0, ip("10.0.0.1"), ip("10.0.0.2"), 443, 50001, "SA"},
        {1.0, 2.0, ip("10.0.0.2"), ip("10.0.0.1"), 50001, 443, "S"},
    };
    auto s = pair_bidirectional(recs);
    REQUIRE(s.size() == 1);
    CHECK(s[0].client_ip == ip("10.0.0.2"));
    CHECK(s[0].server_port == 443);
  }
  SUBCASE("textually smaller address wins when ports do not decide") {
    std::vector<FlowRecord> recs = {
        {1.0, 2.0, ip("10.0.0.9"), ip("10.0.0.10"), 5000, 6000, "S"},
        {1.0, 2.0, ip("10.0.0.10"), ip("10.0.0.9"), 6000, 5000, "S"},
    };
    auto s = pair_bidirectional(recs);
    REQUIRE(s.size() == 1);
    CHECK(s[0].client_ip == ip("10.0.0.10"));
  }
}

TEST_CASE("three overlapping records of one conversation form one session") {
  const std::vector<FlowRecord> recs = {
      {10.0, 12.0, ip("10.0.0.1"), ip("10.0.0.2"), 50000, 80, "S"},
      {10.5, 11.0, ip("10.0.0.2"), ip("10.0.0.1"), 80, 50000, "SA"},
      {11.5, 13.0, ip("10.0.0.1"), ip("10.0.0.2"), 50000, 80, "S"},
  };
  auto related = [&](std::size_t i, std::size_t j) {
    const auto& a = recs[i];
    const auto& b = recs[j];
    const bool same = (a.s_ip == b.s_ip && a.s_port == b.s_port && a.d_ip == b.d_ip &&
                       a.d_port == b.d_port) ||
                      (a.s_ip == b.d_ip && a.s_port == b.d_port && a.d_ip == b.s_ip &&
                       a.d_port == b.s_port);
    return i != j && same && std::max(a.s_time, b.s_time) <= std::min(a.e_time, b.e_time);
  };
  auto groups = oracle::connected_grouping(recs.size(), related);
  REQUIRE(groups.size() == 1);

  auto sessions = pair_bidirectional(recs);
  REQUIRE(sessions.size() == groups.size());
  CHECK(sessions[0].constituent_count == 3);
  CHECK(sessions[0].end == 13.0);
}

TEST_CASE("pairing never drops a record and matches exhaustive grouping") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> side(0, 1);
  std::uniform_real_distribution<double> start(0.0, 10.0), len(0.0, 3.0);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<FlowRecord> recs;
    for (int i = 0; i < 7; ++i) {
      // Two conversations so both merging and separation occur.
      const bool conv = side(rng);
      const bool fwd = side(rng);
      Ipv4 a = conv ? ip("10.0.0.1") : ip("10.0.0.3");
      Ipv4 b = ip("10.0.0.2");
      std::uint16_t pa = 50000, pb = 80;
      double s = start(rng);
      FlowRecord r = fwd ? FlowRecord{s, s + len(rng), a, b, pa, pb, "S"}
                         : FlowRecord{s, s + len(rng), b, a, pb, pa, "SA"};
      recs.push_back(r);
    }
    auto related = [&](std::size_t i, std::size_t j) {
      const auto& x = recs[i];
      const auto& y = recs[j];
      auto key = [](const FlowRecord& r) {
        auto p = std::make_pair(std::make_pair(r.s_ip, r.s_port), std::make_pair(r.d_ip, r.d_port));
        if (p.second < p.first) std::swap(p.first, p.second);
        return p;
      };
      return i != j && key(x) == key(y) &&
             std::max(x.s_time, y.s_time) <= std::min(x.e_time, y.e_time);
    };
    auto groups = oracle::connected_grouping(recs.size(), related);
    auto sessions = pair_bidirectional(recs);
    CHECK(sessions.size() == groups.size());
    int total = 0;
    std::multiset<int> sizes_found, sizes_expected;
    for (const auto& s : sessions) {
      total += s.constituent_count;
      sizes_found.insert(s.constituent_count);
    }
    for (const auto& g : groups) sizes_expected.insert(static_cast<int>(g.size()));
    CHECK(total == 7);
    CHECK(sizes_found == sizes_expected);
  }
}

TEST_CASE("window assignment uses half-open intervals") {
  SessionRecord s;
  s.start = 100.0;
  auto w = window(std::vector<SessionRecord>{s}, 300.0, 0.0);
  REQUIRE(w.size() == 1);
  CHECK(w[0].start == 0.0);
  CHECK(w[0].end() == 300.0);

  s.start = 300.0;
  w = window(std::vector<SessionRecord>{s}, 300.0, 0.0);
  REQUIRE(w.size() == 1);
  CHECK(w[0].start == 300.0);
}

TEST_CASE("window emits empty gap windows") {
  SessionRecord a, b;
  a.start = 10.0;
  b.start = 650.0;
  auto w = window(std::vector<SessionRecord>{b, a}, 300.0, 0.0);
  REQUIRE(w.size() == 3);
  CHECK(w[0].sessions.size() == 1);
  CHECK(w[1].sessions.empty());
  CHECK(w[2].sessions.size() == 1);
  CHECK(w[2].start == 600.0);
}

TEST_CASE("window rejects nonpositive width and accepts no sessions") {
  CHECK_THROWS_AS(window({}, 0.0), Error);
  CHECK_THROWS_AS(window({}, -1.0), Error);
  CHECK(window({}, 10.0).empty());
}

TEST_CASE("windowing partitions the sessions") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> t(-500.0, 5000.0);
  std::vector<SessionRecord> sessions(200);
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    sessions[i].start = t(rng);
    sessions[i].client_port = static_cast<std::uint16_t>(i);
  }
  auto windows = window(sessions, 123.0, 7.0);
  std::multiset<std::uint16_t> seen;
  for (const auto& w : windows) {
    CHECK(w.width == 123.0);
    for (const auto& s : w.sessions) {
      CHECK(s.start >= w.start);
      CHECK(s.start < w.end());
      seen.insert(s.client_port);
    }
  }
  CHECK(seen.size() == sessions.size());
  CHECK(std::set<std::uint16_t>(seen.begin(), seen.end()).size() == sessions.size());
}

TEST_CASE("windowed session CSV restores empty windows") {
  SessionRecord a{ip("10.0.0.1"), ip("10.0.0.2"), 50000, 80, 10.0, 11.0, 2};
  SessionRecord b{ip("10.0.0.3"), ip("10.0.0.2"), 50001, 22, 650.0, 651.5, 1};
  auto windows = window(std::vector<SessionRecord>{a, b}, 300.0, 0.0);
  std::ostringstream out;
  write_windowed_sessions(out, windows);
  CHECK(out.str().rfind(std::string(kSessionHeader) + "\n0,10,11,10.0.0.1,10.0.0.2,50000,80,2\n", 0) == 0);
  std::istringstream in(out.str());
  CHECK(read_windowed_sessions(in, 300.0) == windows);
}
