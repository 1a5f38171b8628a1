#include "hgtop/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <tuple>

#include "hgtop/error.hpp"

namespace hgtop {

namespace detail {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw Error("cannot format number");
  return std::string(buf, ptr);
}

std::optional<double> parse_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    auto next = line.find(sep, pos);
    if (next == std::string_view::npos) {
      out.push_back(line.substr(pos));
      return out;
    }
    out.push_back(line.substr(pos, next - pos));
    pos = next + 1;
  }
}

}  // namespace detail

namespace {

std::optional<std::uint16_t> parse_port(std::string_view s) {
  unsigned long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || v > 65535) {
    return std::nullopt;
  }
  return static_cast<std::uint16_t>(v);
}

std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

struct Endpoint {
  Ipv4 ip;
  std::uint16_t port;
  auto operator<=>(const Endpoint&) const = default;
};

// Client tie-break for records that start at the same instant in opposite
// directions. Returns true when `a` should be the client.
bool prefer_as_client(const Endpoint& a, const Endpoint& b) {
  const bool a_eph = a.port >= 1024;
  const bool b_eph = b.port >= 1024;
  if (a_eph != b_eph) return a_eph;
  const auto as = a.ip.str();
  const auto bs = b.ip.str();
  if (as != bs) return as < bs;
  return a.port < b.port;
}

}  // namespace

std::optional<Ipv4> Ipv4::parse(std::string_view text) {
  auto parts = detail::split(text, '.');
  if (parts.size() != 4) return std::nullopt;
  std::uint32_t bits = 0;
  for (auto part : parts) {
    if (part.empty() || part.size() > 3) return std::nullopt;
    unsigned v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc{} || ptr != part.data() + part.size() || v > 255) return std::nullopt;
    bits = (bits << 8) | v;
  }
  return Ipv4{bits};
}

std::string Ipv4::str() const {
  return std::to_string(bits >> 24) + '.' + std::to_string((bits >> 16) & 0xff) + '.' +
         std::to_string((bits >> 8) & 0xff) + '.' + std::to_string(bits & 0xff);
}

std::vector<FlowRecord> parse_flows(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kFlowHeader) {
    throw ParseError(1, "header", "expected '" + std::string(kFlowHeader) + "'");
  }
  static constexpr std::string_view kNames[] = {"sTime", "eTime", "sIP", "dIP",
                                                "sPort", "dPort", "flags"};
  std::vector<FlowRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    auto view = strip_cr(line);
    if (view.empty()) continue;
    auto fields = detail::split(view, ',');
    if (fields.size() != 7) {
      throw ParseError(line_no, "line",
                       "expected 7 fields, found " + std::to_string(fields.size()));
    }
    auto fail = [&](int i, const std::string& why) {
      throw ParseError(line_no, std::string(kNames[i]), why);
    };
    FlowRecord r;
    auto s = detail::parse_double(fields[0]);
    if (!s || !std::isfinite(*s)) fail(0, "not a finite number");
    auto e = detail::parse_double(fields[1]);
    if (!e || !std::isfinite(*e)) fail(1, "not a finite number");
    if (*e < *s) fail(1, "end time precedes start time");
    r.s_time = *s;
    r.e_time = *e;
    auto sip = Ipv4::parse(fields[2]);
    if (!sip) fail(2, "not a dotted-quad IPv4 address");
    auto dip = Ipv4::parse(fields[3]);
    if (!dip) fail(3, "not a dotted-quad IPv4 address");
    r.s_ip = *sip;
    r.d_ip = *dip;
    auto sp = parse_port(fields[4]);
    if (!sp) fail(4, "port outside 0-65535");
    auto dp = parse_port(fields[5]);
    if (!dp) fail(5, "port outside 0-65535");
    r.s_port = *sp;
    r.d_port = *dp;
    r.flags = std::string(fields[6]);
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<FlowRecord> parse_flows(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_flows(in);
}

void write_flows(std::ostream& out, std::span<const FlowRecord> records) {
  out << kFlowHeader << '\n';
  for (const auto& r : records) {
    if (r.flags.find_first_of(",\n\r") != std::string::npos) {
      throw Error("flags field may not contain commas or line breaks");
    }
    out << detail::format_double(r.s_time) << ',' << detail::format_double(r.e_time) << ','
        << r.s_ip.str() << ',' << r.d_ip.str() << ',' << r.s_port << ',' << r.d_port << ','
        << r.flags << '\n';
  }
}

std::vector<SessionRecord> pair_bidirectional(std::vector<FlowRecord> records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const FlowRecord& a, const FlowRecord& b) { return a.s_time < b.s_time; });

  struct Group {
    double start;
    double end;
    std::vector<std::size_t> members;
  };
  using Key = std::pair<Endpoint, Endpoint>;
  std::map<Key, std::vector<Group>> groups;

  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    Endpoint src{r.s_ip, r.s_port};
    Endpoint dst{r.d_ip, r.d_port};
    Key key = src < dst ? Key{src, dst} : Key{dst, src};
    auto& list = groups[key];
    // Records arrive in start order, so only the most recent group can still
    // overlap: every earlier group ended before it began.
    if (!list.empty() && r.s_time <= list.back().end) {
      auto& g = list.back();
      g.end = std::max(g.end, r.e_time);
      g.members.push_back(i);
    } else {
      list.push_back(Group{r.s_time, r.e_time, {i}});
    }
  }

  std::vector<SessionRecord> sessions;
  for (const auto& [key, list] : groups) {
    for (const auto& g : list) {
      const auto& first = records[g.members.front()];
      Endpoint client{first.s_ip, first.s_port};
      Endpoint server{first.d_ip, first.d_port};
      for (auto idx : g.members) {
        const auto& r = records[idx];
        if (r.s_time != first.s_time) break;
        Endpoint src{r.s_ip, r.s_port};
        if (src != client && prefer_as_client(src, client)) {
          server = client;
          client = src;
        }
      }
      SessionRecord s;
      s.client_ip = client.ip;
      s.client_port = client.port;
      s.server_ip = server.ip;
      s.server_port = server.port;
      s.start = g.start;
      s.end = g.end;
      s.constituent_count = static_cast<int>(g.members.size());
      sessions.push_back(s);
    }
  }
  std::sort(sessions.begin(), sessions.end(), [](const SessionRecord& a, const SessionRecord& b) {
    return std::tie(a.start, a.client_ip, a.client_port, a.server_ip, a.server_port, a.end) <
           std::tie(b.start, b.client_ip, b.client_port, b.server_ip, b.server_port, b.end);
  });
  return sessions;
}

std::vector<TimeWindow> window(std::span<const SessionRecord> sessions, double width,
                               double origin) {
  if (!(width > 0.0) || !std::isfinite(width)) throw Error("window width must be positive");
  if (sessions.empty()) return {};

  std::vector<std::int64_t> index(sessions.size());
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    index[i] = static_cast<std::int64_t>(std::floor((sessions[i].start - origin) / width));
  }
  auto [lo_it, hi_it] = std::minmax_element(index.begin(), index.end());
  const auto lo = *lo_it;
  const auto hi = *hi_it;

  std::vector<TimeWindow> windows(static_cast<std::size_t>(hi - lo + 1));
  for (std::size_t k = 0; k < windows.size(); ++k) {
    windows[k].start = origin + static_cast<double>(lo + static_cast<std::int64_t>(k)) * width;
    windows[k].width = width;
  }
  std::vector<std::size_t> order(sessions.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sessions[a].start < sessions[b].start;
  });
  for (auto i : order) {
    windows[static_cast<std::size_t>(index[i] - lo)].sessions.push_back(sessions[i]);
  }
  return windows;
}

void write_windowed_sessions(std::ostream& out, std::span<const TimeWindow> windows) {
  out << kSessionHeader << '\n';
  for (const auto& w : windows) {
    for (const auto& s : w.sessions) {
      out << detail::format_double(w.start) << ',' << detail::format_double(s.start) << ','
          << detail::format_double(s.end) << ',' << s.client_ip.str() << ','
          << s.server_ip.str() << ',' << s.client_port << ',' << s.server_port << ','
          << s.constituent_count << '\n';
    }
  }
}

std::vector<TimeWindow> read_windowed_sessions(std::istream& in, double width) {
  if (!(width > 0.0)) throw Error("window width must be positive");
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kSessionHeader) {
    throw ParseError(1, "header", "expected '" + std::string(kSessionHeader) + "'");
  }
  static constexpr std::string_view kNames[] = {"window_start", "start",       "end",
                                                "client_ip",    "server_ip",   "client_port",
                                                "server_port",  "constituent_count"};
  std::vector<TimeWindow> windows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    auto view = strip_cr(line);
    if (view.empty()) continue;
    auto f = detail::split(view, ',');
    if (f.size() != 8) throw ParseError(line_no, "line", "expected 8 fields");
    auto fail = [&](int i) -> void {
      throw ParseError(line_no, std::string(kNames[i]), "invalid value");
    };
    auto ws = detail::parse_double(f[0]);
    auto st = detail::parse_double(f[1]);
    auto en = detail::parse_double(f[2]);
    auto cip = Ipv4::parse(f[3]);
    auto sip = Ipv4::parse(f[4]);
    auto cp = parse_port(f[5]);
    auto sp = parse_port(f[6]);
    if (!ws) fail(0);
    if (!st) fail(1);
    if (!en) fail(2);
    if (!cip) fail(3);
    if (!sip) fail(4);
    if (!cp) fail(5);
    if (!sp) fail(6);
    int count = 0;
    auto [ptr, ec] = std::from_chars(f[7].data(), f[7].data() + f[7].size(), count);
    if (ec != std::errc{} || ptr != f[7].data() + f[7].size() || count < 1) fail(7);

    if (windows.empty() || windows.back().start != *ws) {
      if (!windows.empty()) {
        if (*ws < windows.back().start) throw ParseError(line_no, "window_start", "not ascending");
        // Restore empty windows skipped by the writer.
        const double gap = (*ws - windows.back().start) / width;
        const auto missing = static_cast<std::int64_t>(std::llround(gap)) - 1;
        const double base = windows.back().start;
        for (std::int64_t k = 1; k <= missing; ++k) {
          windows.push_back(TimeWindow{base + static_cast<double>(k) * width, width, {}});
        }
      }
      windows.push_back(TimeWindow{*ws, width, {}});
    }
    windows.back().sessions.push_back(SessionRecord{*cip, *sip, *cp, *sp, *st, *en, count});
  }
  return windows;
}

}  // namespace hgtop
