#include "hgtop/detector.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <ostream>

#include "json.hpp"

#include "hgtop/error.hpp"
#include "hgtop/hypergraph.hpp"
#include "hgtop/topology.hpp"

namespace hgtop {

namespace {

constexpr std::array<std::string_view, 10> kFeatureNames = {
    "n_records",          "n_unique_sIP",       "n_unique_dPort", "max_edge_size",
    "mean_edge_size",     "max_ecp_in_degree",  "max_ecp_out_degree",
    "rbs_beta0",          "rbs_beta1",          "max_support_multiplicity"};

}  // namespace

std::string_view feature_name(Feature f) { return kFeatureNames[static_cast<std::size_t>(f)]; }

std::optional<Feature> feature_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kFeatureNames.size(); ++i) {
    if (kFeatureNames[i] == name) return static_cast<Feature>(i);
  }
  return std::nullopt;
}

const std::vector<Feature>& default_features() {
  static const std::vector<Feature> kDefault = {
      Feature::n_records,          Feature::n_unique_sip,       Feature::n_unique_dport,
      Feature::max_edge_size,      Feature::mean_edge_size,     Feature::max_ecp_in_degree,
      Feature::max_ecp_out_degree, Feature::rbs_beta0,          Feature::rbs_beta1,
      Feature::max_support_multiplicity};
  return kDefault;
}

FeatureVector summarize_window(const TimeWindow& w, std::span<const Feature> features) {
  FeatureVector out{w.start, std::vector<double>(features.size(), 0.0)};
  if (w.sessions.empty()) return out;

  const auto h = build_hypergraph(w);
  const auto st = stats(h);
  const auto ecp = build_ecp(h);
  // Betti numbers up to dimension 1 only need chains of length <= 3.
  const auto rbs = betti(order_complex(ecp, 2), 1);

  for (std::size_t i = 0; i < features.size(); ++i) {
    double v = 0.0;
    switch (features[i]) {
      case Feature::n_records: v = static_cast<double>(w.sessions.size()); break;
      case Feature::n_unique_sip: v = static_cast<double>(st.n_vertices); break;
      case Feature::n_unique_dport: v = static_cast<double>(st.n_edges); break;
      case Feature::max_edge_size: v = static_cast<double>(st.max_edge_size); break;
      case Feature::mean_edge_size: v = st.mean_edge_size; break;
      case Feature::max_ecp_in_degree: v = static_cast<double>(ecp.max_in_degree()); break;
      case Feature::max_ecp_out_degree: v = static_cast<double>(ecp.max_out_degree()); break;
      case Feature::rbs_beta0: v = static_cast<double>(rbs.betti[0]); break;
      case Feature::rbs_beta1: v = static_cast<double>(rbs.betti[1]); break;
      case Feature::max_support_multiplicity:
        v = static_cast<double>(st.max_support_multiplicity);
        break;
    }
    out.values[i] = v;
  }
  return out;
}

void write_features(std::ostream& out, std::span<const std::string> names,
                    std::span<const FeatureVector> vectors) {
  out << "window_start";
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  for (const auto& v : vectors) {
    if (v.values.size() != names.size()) throw Error("feature vector length differs from header");
    out << detail::format_double(v.window_start);
    for (double x : v.values) out << ',' << detail::format_double(x);
    out << '\n';
  }
}

std::pair<std::vector<std::string>, std::vector<FeatureVector>> read_features(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "header", "missing header");
  auto head = detail::split(line, ',');
  if (head.empty() || head[0] != "window_start" || head.size() < 2) {
    throw ParseError(1, "header", "expected 'window_start,<feature>,...'");
  }
  std::vector<std::string> names(head.begin() + 1, head.end());
  std::vector<FeatureVector> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = detail::split(line, ',');
    if (f.size() != head.size()) throw ParseError(line_no, "line", "wrong number of fields");
    FeatureVector v;
    for (std::size_t i = 0; i < f.size(); ++i) {
      auto x = detail::parse_double(f[i]);
      if (!x || !std::isfinite(*x)) throw ParseError(line_no, std::string(head[i]), "not finite");
      if (i == 0) {
        v.window_start = *x;
      } else {
        v.values.push_back(*x);
      }
    }
    rows.push_back(std::move(v));
  }
  return {std::move(names), std::move(rows)};
}

std::string AnomalyReport::to_json() const {
  nlohmann::ordered_json j;
  j["window_start"] = window_start;
  j["score"] = score;
  j["threshold"] = threshold;
  j["anomalous"] = anomalous;
  if (attribution) {
    j["attribution"] = *attribution;
  } else {
    j["attribution"] = nullptr;
  }
  return j.dump();
}

void write_reports(std::ostream& out, std::span<const AnomalyReport> reports) {
  for (const auto& r : reports) out << r.to_json() << '\n';
}

double quantile_of(std::vector<double> sample, double q) {
  if (sample.empty()) throw Error("quantile of an empty sample");
  if (!(q > 0.0 && q <= 1.0)) throw Error("quantile must lie in (0, 1]");
  std::sort(sample.begin(), sample.end());
  const double h = static_cast<double>(sample.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sample.size()) return sample.back();
  return sample[lo] + (h - static_cast<double>(lo)) * (sample[lo + 1] - sample[lo]);
}

// --- Baseline -------------------------------------------------------------------

Baseline Baseline::init(std::span<const FeatureVector> vectors, const DetectorParams& params,
                        std::vector<std::string> coordinate_names) {
  if (params.capacity < 3) throw Error("baseline capacity must be at least 3");
  if (vectors.size() != params.capacity) {
    throw Error("baseline needs exactly " + std::to_string(params.capacity) + " vectors, got " +
                std::to_string(vectors.size()));
  }
  if (!(params.max_eps > 0.0)) throw Error("max_eps must be positive");
  if (params.max_dim < 0) throw Error("max_dim must be nonnegative");
  if (!(params.quantile > 0.0 && params.quantile <= 1.0)) {
    throw Error("quantile must lie in (0, 1]");
  }
  const auto dim = vectors.front().values.size();
  if (dim == 0) throw Error("feature vectors are empty");
  for (const auto& v : vectors) {
    if (v.values.size() != dim) throw Error("feature vectors differ in length");
    for (double x : v.values)
      if (!std::isfinite(x)) throw Error("feature values must be finite");
  }
  if (coordinate_names.empty()) {
    for (std::size_t i = 0; i < dim; ++i) coordinate_names.push_back("x" + std::to_string(i));
  }
  if (coordinate_names.size() != dim) throw Error("coordinate name count differs from dimension");

  Baseline b;
  b.params_ = params;
  b.names_ = std::move(coordinate_names);
  b.mean_.assign(dim, 0.0);
  b.scale_.assign(dim, 0.0);
  const auto n = static_cast<double>(vectors.size());
  for (const auto& v : vectors)
    for (std::size_t i = 0; i < dim; ++i) b.mean_[i] += v.values[i];
  for (auto& m : b.mean_) m /= n;
  for (const auto& v : vectors) {
    for (std::size_t i = 0; i < dim; ++i) {
      const double d = v.values[i] - b.mean_[i];
      b.scale_[i] += d * d / n;
    }
  }
  for (std::size_t i = 0; i < dim; ++i) {
    const double sd = std::sqrt(b.scale_[i]);
    // Rounding in the mean leaves a residue of order 1e-16 for constant
    // columns; treat that as zero spread.
    b.scale_[i] = sd > 1e-12 * std::max(1.0, std::abs(b.mean_[i])) ? sd : 1.0;
  }
  for (const auto& v : vectors) b.points_.push_back(b.standardize(v));
  const std::vector<Point> cloud(b.points_.begin(), b.points_.end());
  b.diagram_ = b.diagram_of(cloud);
  return b;
}

Point Baseline::standardize(const FeatureVector& v) const {
  if (v.values.size() != mean_.size()) throw Error("feature vector has the wrong length");
  Point z(mean_.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = (v.values[i] - mean_[i]) / scale_[i];
  return z;
}

PersistenceDiagram Baseline::diagram_of(std::span<const Point> cloud) const {
  return barcode(vietoris_rips(cloud, params_.max_eps, params_.max_dim)).truncated(params_.max_eps);
}

std::vector<Point> Baseline::cloud_with(const Point& z) const {
  std::vector<Point> cloud(points_.begin(), points_.end());
  cloud.push_back(z);
  return cloud;
}

double Baseline::score_standardized(const Point& z) const {
  const auto with = diagram_of(cloud_with(z));
  double total = 0.0;
  for (int d = 0; d <= params_.max_dim; ++d) {
    total += wasserstein(with, diagram_, static_cast<std::size_t>(d), params_.p);
  }
  return total;
}

double Baseline::score(const FeatureVector& v) const { return score_standardized(standardize(v)); }

double Baseline::calibrate_threshold(double quantile) const {
  std::vector<double> loo;
  loo.reserve(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    std::vector<Point> rest;
    for (std::size_t j = 0; j < points_.size(); ++j)
      if (j != i) rest.push_back(points_[j]);
    const auto reduced = diagram_of(rest);
    rest.push_back(points_[i]);
    const auto full = diagram_of(rest);
    double s = 0.0;
    for (int d = 0; d <= params_.max_dim; ++d) {
      s += wasserstein(full, reduced, static_cast<std::size_t>(d), params_.p);
    }
    loo.push_back(s);
  }
  return params_.slack * quantile_of(std::move(loo), quantile);
}

std::size_t Baseline::attribute(const FeatureVector& v) const {
  const auto z = standardize(v);
  const double base = score_standardized(z);
  std::vector<double> centroid(z.size(), 0.0);
  for (const auto& p : points_)
    for (std::size_t i = 0; i < z.size(); ++i)
      centroid[i] += p[i] / static_cast<double>(points_.size());

  std::size_t best = 0;
  double best_drop = -kInfinity;
  for (std::size_t i = 0; i < z.size(); ++i) {
    auto probe = z;
    probe[i] = centroid[i];
    const double drop = base - score_standardized(probe);
    if (drop > best_drop) {
      best_drop = drop;
      best = i;
    }
  }
  return best;
}

std::pair<AnomalyReport, Baseline> Baseline::step(const FeatureVector& v, double threshold) const {
  const auto z = standardize(v);
  AnomalyReport report;
  report.window_start = v.window_start;
  report.score = score_standardized(z);
  report.threshold = threshold;
  report.anomalous = report.score > threshold;
  if (report.anomalous) {
    report.attribution = names_[attribute(v)];
    return {std::move(report), *this};
  }
  Baseline next = *this;
  next.points_.pop_front();
  next.points_.push_back(z);
  const std::vector<Point> cloud(next.points_.begin(), next.points_.end());
  next.diagram_ = next.diagram_of(cloud);
  return {std::move(report), std::move(next)};
}

}  // namespace hgtop
