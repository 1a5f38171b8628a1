#include "hgtop/pipeline.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <string_view>

#include "hgtop/error.hpp"

namespace hgtop {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_integer(std::string_view v, std::size_t line, const std::string& key) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ParseError(line, key, "expected a nonnegative integer");
  }
  return out;
}

double parse_real(std::string_view v, std::size_t line, const std::string& key) {
  auto x = detail::parse_double(v);
  if (!x || !std::isfinite(*x)) throw ParseError(line, key, "expected a finite number");
  return *x;
}

}  // namespace

std::vector<std::string> RunConfig::feature_names() const {
  std::vector<std::string> names;
  for (auto f : features) names.emplace_back(feature_name(f));
  return names;
}

RunConfig parse_config(std::istream& in, RunConfig cfg) {
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "line", "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));

    auto positive = [&](double x) {
      if (!(x > 0.0)) throw ParseError(line_no, key, "must be positive");
      return x;
    };

    if (key == "capacity") {
      cfg.detector.capacity = parse_integer<std::size_t>(value, line_no, key);
      if (cfg.detector.capacity < 3) throw ParseError(line_no, key, "must be at least 3");
    } else if (key == "window_width") {
      cfg.window_width = positive(parse_real(value, line_no, key));
    } else if (key == "origin") {
      cfg.origin = parse_real(value, line_no, key);
    } else if (key == "max_eps") {
      cfg.detector.max_eps = positive(parse_real(value, line_no, key));
    } else if (key == "max_dim") {
      cfg.detector.max_dim = parse_integer<int>(value, line_no, key);
    } else if (key == "quantile") {
      const double q = parse_real(value, line_no, key);
      if (!(q > 0.0 && q <= 1.0)) throw ParseError(line_no, key, "must lie in (0, 1]");
      cfg.detector.quantile = q;
    } else if (key == "slack") {
      cfg.detector.slack = positive(parse_real(value, line_no, key));
    } else if (key == "wasserstein_p") {
      const double p = parse_real(value, line_no, key);
      if (!(p >= 1.0)) throw ParseError(line_no, key, "must be >= 1");
      cfg.detector.p = p;
    } else if (key == "features") {
      cfg.features.clear();
      for (auto name : detail::split(value, ',')) {
        auto f = feature_from_name(trim(name));
        if (!f) throw ParseError(line_no, key, "unknown feature '" + std::string(trim(name)) + "'");
        cfg.features.push_back(*f);
      }
    } else if (key == "seed") {
      cfg.seed = parse_integer<std::uint64_t>(value, line_no, key);
    } else if (key == "n_clients") {
      cfg.profile.n_clients = parse_integer<std::size_t>(value, line_no, key);
    } else if (key == "n_servers") {
      cfg.profile.n_servers = parse_integer<std::size_t>(value, line_no, key);
    } else if (key == "mean_flows") {
      cfg.profile.mean_flows = parse_real(value, line_no, key);
    } else if (key == "windows") {
      cfg.windows = parse_integer<std::size_t>(value, line_no, key);
      if (cfg.windows == 0) throw ParseError(line_no, key, "must be positive");
    } else if (key == "common_ports") {
      cfg.profile.common_ports.clear();
      for (auto p : detail::split(value, ',')) {
        cfg.profile.common_ports.push_back(parse_integer<std::uint16_t>(trim(p), line_no, key));
      }
    } else if (key == "scan_windows") {
      cfg.scan_windows.clear();
      if (!value.empty()) {
        for (auto w : detail::split(value, ',')) {
          cfg.scan_windows.push_back(parse_integer<std::size_t>(trim(w), line_no, key));
        }
      }
    } else if (key == "scan_ports") {
      const auto parts = detail::split(value, '-');
      if (parts.size() != 2) throw ParseError(line_no, key, "expected 'lo-hi'");
      cfg.scan_port_lo = parse_integer<std::uint16_t>(trim(parts[0]), line_no, key);
      cfg.scan_port_hi = parse_integer<std::uint16_t>(trim(parts[1]), line_no, key);
      if (cfg.scan_port_lo > cfg.scan_port_hi) throw ParseError(line_no, key, "lo exceeds hi");
    } else if (key == "ae_hidden") {
      cfg.ae_hidden = parse_integer<std::size_t>(value, line_no, key);
    } else if (key == "ae_bottleneck") {
      cfg.ae_bottleneck = parse_integer<std::size_t>(value, line_no, key);
    } else if (key == "ae_epochs") {
      cfg.ae_train.epochs = parse_integer<std::size_t>(value, line_no, key);
    } else if (key == "ae_batch_size") {
      cfg.ae_train.batch_size = parse_integer<std::size_t>(value, line_no, key);
    } else if (key == "ae_learning_rate") {
      cfg.ae_train.learning_rate = positive(parse_real(value, line_no, key));
    } else if (key == "ae_momentum") {
      cfg.ae_train.momentum = parse_real(value, line_no, key);
    } else if (key == "autoencoder") {
      if (value == "off") {
        cfg.ae_model_path.reset();
      } else if (value.empty() || value == "on") {
        throw ParseError(line_no, key, "expected 'off' or a model file path");
      } else {
        cfg.ae_model_path = std::string(value);
      }
    } else {
      throw ParseError(line_no, key, "unknown configuration key");
    }
  }
  return cfg;
}

std::vector<FlowRecord> synthesize(const RunConfig& cfg) {
  auto profile = cfg.profile;
  profile.seed = cfg.seed;
  profile.window_width = cfg.window_width;
  profile.duration = static_cast<double>(cfg.windows) * cfg.window_width;
  auto records = generate_normal(profile);
  for (auto w : cfg.scan_windows) {
    ScanSpec scan;
    scan.scanner_ip = profile.external_ip(0);
    scan.target_ip = profile.server_ip(0);
    scan.port_lo = cfg.scan_port_lo;
    scan.port_hi = cfg.scan_port_hi;
    scan.window_index = w;
    records = inject_scan(std::move(records), scan, profile);
  }
  return records;
}

std::vector<FeatureVector> summarize_windows(const std::vector<TimeWindow>& windows,
                                             const std::vector<Feature>& features) {
  std::vector<FeatureVector> out;
  out.reserve(windows.size());
  for (const auto& w : windows) out.push_back(summarize_window(w, features));
  return out;
}

DetectionRun run_detection(const std::vector<FeatureVector>& vectors,
                           const DetectorParams& params, std::vector<std::string> names) {
  if (vectors.size() < params.capacity) {
    throw Error("need at least " + std::to_string(params.capacity) +
                " feature vectors to fill the baseline, got " + std::to_string(vectors.size()));
  }
  const std::span<const FeatureVector> all(vectors);
  auto baseline = Baseline::init(all.first(params.capacity), params, std::move(names));
  DetectionRun run{{}, baseline.calibrate_threshold(), baseline, baseline};
  for (const auto& v : all.subspan(params.capacity)) {
    auto [report, next] = run.final.step(v, run.threshold);
    run.reports.push_back(std::move(report));
    run.final = std::move(next);
  }
  return run;
}

}  // namespace hgtop
