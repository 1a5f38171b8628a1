#pragma once

// Netflow CSV ingest: parsing, bidirectional session pairing and fixed-width
// time windowing.

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hgtop {

/// IPv4 address held in host byte order. Ordering is numeric, which is the
/// lexicographic order of the four octets.
struct Ipv4 {
  std::uint32_t bits = 0;

  static std::optional<Ipv4> parse(std::string_view text);
  static constexpr Ipv4 from_octets(std::uint8_t a, std::uint8_t b, std::uint8_t c,
                                    std::uint8_t d) {
    return Ipv4{(std::uint32_t{a} << 24) | (std::uint32_t{b} << 16) | (std::uint32_t{c} << 8) |
                std::uint32_t{d}};
  }
  std::string str() const;

  auto operator<=>(const Ipv4&) const = default;
};

struct FlowRecord {
  double s_time = 0.0;
  double e_time = 0.0;
  Ipv4 s_ip;
  Ipv4 d_ip;
  std::uint16_t s_port = 0;
  std::uint16_t d_port = 0;
  std::string flags;

  bool operator==(const FlowRecord&) const = default;
};

/// One communication assembled from one or more unidirectional flow records.
struct SessionRecord {
  Ipv4 client_ip;
  Ipv4 server_ip;
  std::uint16_t client_port = 0;
  std::uint16_t server_port = 0;
  double start = 0.0;
  double end = 0.0;
  int constituent_count = 1;

  bool operator==(const SessionRecord&) const = default;
};

/// Half-open interval [start, start + width) and the sessions starting in it.
struct TimeWindow {
  double start = 0.0;
  double width = 0.0;
  std::vector<SessionRecord> sessions;

  double end() const { return start + width; }
  bool operator==(const TimeWindow&) const = default;
};

inline constexpr std::string_view kFlowHeader = "sTime,eTime,sIP,dIP,sPort,dPort,flags";
inline constexpr std::string_view kSessionHeader =
    "window_start,start,end,client_ip,server_ip,client_port,server_port,constituent_count";

/// Parses flow CSV. The first line must be exactly kFlowHeader. Throws
/// ParseError naming the line (1-based, header is line 1) and field.
std::vector<FlowRecord> parse_flows(std::istream& in);
std::vector<FlowRecord> parse_flows(std::string_view text);

/// Writes kFlowHeader followed by one line per record. Numbers use the
/// shortest representation that parses back to the same double.
void write_flows(std::ostream& out, std::span<const FlowRecord> records);

/// Merges flows sharing an endpoint pair (either direction) whose intervals
/// overlap, transitively. The client is the source of the earliest record;
/// simultaneous opposite-direction starts fall back to the side with port
/// >= 1024, then the textually smaller IP. Output is sorted by start.
std::vector<SessionRecord> pair_bidirectional(std::vector<FlowRecord> records);

/// Assigns each session to window floor((start - origin) / width). Every
/// window between the first and last occupied one is emitted, empty or not.
std::vector<TimeWindow> window(std::span<const SessionRecord> sessions, double width,
                               double origin = 0.0);

void write_windowed_sessions(std::ostream& out, std::span<const TimeWindow> windows);

/// Inverse of write_windowed_sessions. Empty windows are restored from gaps
/// between consecutive window_start values.
std::vector<TimeWindow> read_windowed_sessions(std::istream& in, double width);

namespace detail {
std::string format_double(double v);
std::optional<double> parse_double(std::string_view s);
std::vector<std::string_view> split(std::string_view line, char sep);
}  // namespace detail

}  // namespace hgtop
