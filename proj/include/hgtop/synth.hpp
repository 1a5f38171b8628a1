#pragma once

// Seeded synthetic netflow: Poisson client-server traffic on a small palette
// of service ports, with optional injected port scans.

#include <cstdint>
#include <vector>

#include "hgtop/ingest.hpp"

namespace hgtop {

struct TrafficProfile {
  std::size_t n_clients = 30;
  std::size_t n_servers = 4;
  std::vector<std::uint16_t> common_ports = {22, 53, 80, 443};
  /// Poisson mean of sessions each client opens per window.
  double mean_flows = 3.0;
  double duration = 60 * 300.0;
  double window_width = 300.0;
  std::uint64_t seed = 1;

  std::size_t window_count() const;
  /// Clients are 10.0.0.1.., servers 10.1.0.1.., hosts outside the normal
  /// population 10.2.0.1..
  Ipv4 client_ip(std::size_t i) const;
  Ipv4 server_ip(std::size_t i) const;
  Ipv4 external_ip(std::size_t i) const;
};

struct ScanSpec {
  Ipv4 scanner_ip;
  Ipv4 target_ip;
  std::uint16_t port_lo = 400;
  std::uint16_t port_hi = 499;
  std::size_t window_index = 0;
};

/// Each client opens Poisson(mean_flows) sessions per window to a random
/// server and common port; every session yields a forward and a reverse
/// record. Output is sorted by start time and fixed by the seed.
std::vector<FlowRecord> generate_normal(const TrafficProfile& p);

/// Adds one unanswered flow per port in [lo, hi] from the scanner to the
/// target, timed inside the chosen window, and re-sorts by start time.
std::vector<FlowRecord> inject_scan(std::vector<FlowRecord> records, const ScanSpec& s,
                                    const TrafficProfile& p);

}  // namespace hgtop
