#include "hgtop/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hgtop/error.hpp"

namespace hgtop {

namespace {

void validate(const TrafficProfile& p) {
  if (p.n_clients < 1 || p.n_servers < 1 || p.common_ports.empty()) {
    throw Error("traffic profile needs at least one client, server and port");
  }
  if (p.n_clients > 65000 || p.n_servers > 65000) throw Error("too many hosts for the /16 plan");
  if (!(p.mean_flows >= 0.0)) throw Error("mean flows must be nonnegative");
  if (!(p.window_width > 0.0) || !(p.duration >= p.window_width)) {
    throw Error("duration must cover at least one positive-width window");
  }
}

void sort_by_start(std::vector<FlowRecord>& records) {
  std::stable_sort(records.begin(), records.end(), [](const FlowRecord& a, const FlowRecord& b) {
    return a.s_time < b.s_time;
  });
}

// Timestamps are kept on a millisecond grid so the CSV stays short.
double round_ms(double t) { return std::round(t * 1000.0) / 1000.0; }

}  // namespace

std::size_t TrafficProfile::window_count() const {
  return static_cast<std::size_t>(std::floor(duration / window_width));
}

Ipv4 TrafficProfile::client_ip(std::size_t i) const {
  const auto host = i + 1;
  return Ipv4::from_octets(10, 0, static_cast<std::uint8_t>(host >> 8),
                           static_cast<std::uint8_t>(host & 0xff));
}

Ipv4 TrafficProfile::server_ip(std::size_t i) const {
  const auto host = i + 1;
  return Ipv4::from_octets(10, 1, static_cast<std::uint8_t>(host >> 8),
                           static_cast<std::uint8_t>(host & 0xff));
}

Ipv4 TrafficProfile::external_ip(std::size_t i) const {
  const auto host = i + 1;
  return Ipv4::from_octets(10, 2, static_cast<std::uint8_t>(host >> 8),
                           static_cast<std::uint8_t>(host & 0xff));
}

std::vector<FlowRecord> generate_normal(const TrafficProfile& p) {
  validate(p);
  std::mt19937_64 rng(p.seed);
  std::poisson_distribution<int> count(p.mean_flows);
  std::uniform_int_distribution<std::size_t> pick_server(0, p.n_servers - 1);
  std::uniform_int_distribution<std::size_t> pick_port(0, p.common_ports.size() - 1);
  std::uniform_int_distribution<int> ephemeral(49152, 65535);
  std::uniform_real_distribution<double> offset(0.0, 1.0);
  std::exponential_distribution<double> length(1.0);

  std::vector<FlowRecord> records;
  const auto windows = p.window_count();
  for (std::size_t w = 0; w < windows; ++w) {
    const double start = static_cast<double>(w) * p.window_width;
    for (std::size_t c = 0; c < p.n_clients; ++c) {
      const int k = p.mean_flows > 0.0 ? count(rng) : 0;
      for (int i = 0; i < k; ++i) {
        const auto server = p.server_ip(pick_server(rng));
        const auto port = p.common_ports[pick_port(rng)];
        const auto client_port = static_cast<std::uint16_t>(ephemeral(rng));
        const double s = round_ms(start + offset(rng) * p.window_width * 0.98);
        const double e = round_ms(s + 0.01 + length(rng));
        const double rs = round_ms(s + 0.001);
        const auto client = p.client_ip(c);
        records.push_back(FlowRecord{s, e, client, server, client_port, port, "S"});
        records.push_back(FlowRecord{rs, e, server, client, port, client_port, "SA"});
      }
    }
  }
  sort_by_start(records);
  return records;
}

std::vector<FlowRecord> inject_scan(std::vector<FlowRecord> records, const ScanSpec& s,
                                    const TrafficProfile& p) {
  validate(p);
  if (s.port_lo > s.port_hi) throw Error("scan port range is empty");
  if (s.window_index >= p.window_count()) throw Error("scan window lies outside the profile");
  const double start = static_cast<double>(s.window_index) * p.window_width;
  const auto n = static_cast<std::size_t>(s.port_hi - s.port_lo) + 1;
  // Spread the probes over the middle of the window.
  const double spacing = (p.window_width * 0.5) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = round_ms(start + p.window_width * 0.25 + static_cast<double>(i) * spacing);
    const auto port = static_cast<std::uint16_t>(s.port_lo + i);
    // Source ports sit below the ephemeral range used by normal clients, so a
    // probe never pairs with unrelated traffic.
    const auto src_port = static_cast<std::uint16_t>(33000 + i % 16000);
    records.push_back(FlowRecord{t, t, s.scanner_ip, s.target_ip, src_port, port, "S"});
  }
  sort_by_start(records);
  return records;
}

}  // namespace hgtop
