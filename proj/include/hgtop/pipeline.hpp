#pragma once

// Composition of the stages used by the CLI and the Python module, plus the
// plain-text `key = value` run configuration.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hgtop/autoencoder.hpp"
#include "hgtop/detector.hpp"
#include "hgtop/synth.hpp"

namespace hgtop {

struct RunConfig {
  double window_width = 300.0;
  double origin = 0.0;
  DetectorParams detector;
  std::vector<Feature> features = default_features();
  std::uint64_t seed = 1;

  // Synthetic scenario.
  TrafficProfile profile;
  std::size_t windows = 60;
  std::vector<std::size_t> scan_windows;
  // A 100-port sweep by a host outside the normal population that touches
  // one common port (443).
  std::uint16_t scan_port_lo = 400;
  std::uint16_t scan_port_hi = 499;

  // Autoencoder.
  std::size_t ae_hidden = 16;
  std::size_t ae_bottleneck = 3;
  TrainConfig ae_train;
  std::optional<std::string> ae_model_path;

  std::vector<std::string> feature_names() const;
};

/// Reads `key = value` lines; `#` starts a comment. Unknown keys and bad
/// values raise ParseError. Unmentioned keys keep the values already in
/// `base`.
RunConfig parse_config(std::istream& in, RunConfig base = {});

/// Normal traffic from cfg.profile over `windows` windows of the configured
/// width, seeded by cfg.seed, with a scan injected into every listed window.
std::vector<FlowRecord> synthesize(const RunConfig& cfg);

std::vector<FeatureVector> summarize_windows(const std::vector<TimeWindow>& windows,
                                             const std::vector<Feature>& features);

struct DetectionRun {
  std::vector<AnomalyReport> reports;
  double threshold = 0.0;
  Baseline initial;
  Baseline final;
};

/// Fits the baseline on the first `capacity` vectors, calibrates the
/// threshold and steps through the remainder in order.
DetectionRun run_detection(const std::vector<FeatureVector>& vectors,
                           const DetectorParams& params, std::vector<std::string> names);

}  // namespace hgtop
