#pragma once

// Sliding-baseline persistent-homology anomaly detector. Each time window is
// summarized as a feature vector; a fixed-capacity baseline of standardized
// vectors carries a cached persistence diagram, and new windows are scored by
// how far adding them moves that diagram in Wasserstein distance.

#include <deque>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hgtop/ingest.hpp"
#include "hgtop/persistence.hpp"

namespace hgtop {

enum class Feature {
  n_records,
  n_unique_sip,
  n_unique_dport,
  max_edge_size,
  mean_edge_size,
  max_ecp_in_degree,
  max_ecp_out_degree,
  rbs_beta0,
  rbs_beta1,
  max_support_multiplicity,
};

std::string_view feature_name(Feature f);
std::optional<Feature> feature_from_name(std::string_view name);
const std::vector<Feature>& default_features();

struct FeatureVector {
  double window_start = 0.0;
  std::vector<double> values;
  bool operator==(const FeatureVector&) const = default;
};

/// Builds the window's hypergraph, edge-containment order and order complex
/// and reads off the requested coordinates. An empty window maps to zeros.
FeatureVector summarize_window(const TimeWindow& w,
                               std::span<const Feature> features = default_features());

void write_features(std::ostream& out, std::span<const std::string> names,
                    std::span<const FeatureVector> vectors);
/// Returns the coordinate names from the header and the rows.
std::pair<std::vector<std::string>, std::vector<FeatureVector>> read_features(std::istream& in);

struct DetectorParams {
  std::size_t capacity = 20;
  double max_eps = 1000.0;
  int max_dim = 1;
  double quantile = 0.99;
  double slack = 1.5;
  double p = 1.0;

  bool operator==(const DetectorParams&) const = default;
};

struct AnomalyReport {
  double window_start = 0.0;
  double score = 0.0;
  double threshold = 0.0;
  bool anomalous = false;
  std::optional<std::string> attribution;

  /// Single-line JSON object with keys in a fixed order.
  std::string to_json() const;
};

/// One JSON object per line.
void write_reports(std::ostream& out, std::span<const AnomalyReport> reports);

/// Linear-interpolation quantile of an unsorted sample; q in (0, 1].
double quantile_of(std::vector<double> sample, double q);

class Baseline {
 public:
  /// Fits per-coordinate z-scores on `vectors` (a zero spread is replaced by
  /// 1) and caches the diagram. Requires |vectors| == capacity >= 3.
  static Baseline init(std::span<const FeatureVector> vectors, const DetectorParams& params,
                       std::vector<std::string> coordinate_names = {});

  const DetectorParams& params() const { return params_; }
  const std::deque<Point>& points() const { return points_; }
  const PersistenceDiagram& diagram() const { return diagram_; }
  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& scale() const { return scale_; }
  const std::vector<std::string>& coordinate_names() const { return names_; }

  Point standardize(const FeatureVector& v) const;

  /// Diagram of a standardized point cloud: Rips barcode with deaths
  /// truncated at max_eps.
  PersistenceDiagram diagram_of(std::span<const Point> cloud) const;

  /// Sum over dimensions 0..max_dim of the Wasserstein distance between the
  /// diagram with `v` added and the cached diagram.
  double score(const FeatureVector& v) const;
  double score_standardized(const Point& z) const;

  /// Leave-one-out scores of the baseline points, quantile, times slack.
  double calibrate_threshold(double quantile) const;
  double calibrate_threshold() const { return calibrate_threshold(params_.quantile); }

  /// Coordinate whose replacement by the baseline mean lowers the score
  /// most; ties go to the lowest index.
  std::size_t attribute(const FeatureVector& v) const;

  /// Scores `v`; at or below threshold the oldest point is replaced by `v`,
  /// above it the baseline is returned unchanged and the report carries an
  /// attribution.
  std::pair<AnomalyReport, Baseline> step(const FeatureVector& v, double threshold) const;

  bool operator==(const Baseline&) const = default;

 private:
  Baseline() = default;
  std::vector<Point> cloud_with(const Point& z) const;

  DetectorParams params_;
  std::vector<std::string> names_;
  std::vector<double> mean_;
  std::vector<double> scale_;
  std::deque<Point> points_;
  PersistenceDiagram diagram_;
};

}  // namespace hgtop
