// hgtop: command-line front end for each pipeline stage.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hgtop/error.hpp"
#include "hgtop/hypergraph.hpp"
#include "hgtop/pipeline.hpp"
#include "hgtop/topology.hpp"

namespace fs = std::filesystem;
using namespace hgtop;

namespace {

struct Overrides {
  std::string config;
  std::optional<double> window_width;
  std::optional<double> max_eps;
  std::optional<std::size_t> capacity;
  std::optional<double> quantile;
  std::optional<std::uint64_t> seed;
  std::string out = "-";
};

RunConfig load_config(const Overrides& o) {
  RunConfig cfg;
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw Error("cannot open config '" + o.config + "'");
    try {
      cfg = parse_config(in);
    } catch (const ParseError& e) {
      throw Error(o.config + ": " + e.what());
    }
  }
  if (o.window_width) {
    if (!(*o.window_width > 0.0)) throw Error("--window-width must be positive");
    cfg.window_width = *o.window_width;
  }
  if (o.max_eps) {
    if (!(*o.max_eps > 0.0)) throw Error("--max-eps must be positive");
    cfg.detector.max_eps = *o.max_eps;
  }
  if (o.capacity) cfg.detector.capacity = *o.capacity;
  if (o.quantile) {
    if (!(*o.quantile > 0.0 && *o.quantile <= 1.0)) throw Error("--quantile must lie in (0, 1]");
    cfg.detector.quantile = *o.quantile;
  }
  if (o.seed) cfg.seed = *o.seed;
  return cfg;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return in;
}

// Runs `body` against the output stream. Files are written beside the target
// and renamed into place only once `body` has finished.
void emit(const std::string& path, const std::function<void(std::ostream&)>& body) {
  if (path == "-") {
    body(std::cout);
    std::cout.flush();
    if (!std::cout) throw Error("failed writing to standard output");
    return;
  }
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".partial";
  try {
    {
      std::ofstream out(tmp, std::ios::trunc);
      if (!out) throw Error("cannot write '" + tmp.string() + "'");
      body(out);
      out.flush();
      if (!out) throw Error("failed writing '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
  } catch (...) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw;
  }
}

std::vector<TimeWindow> read_sessions(const std::string& path, const RunConfig& cfg) {
  auto in = open_input(path);
  return read_windowed_sessions(in, cfg.window_width);
}

std::pair<std::vector<std::string>, std::vector<FeatureVector>> read_feature_file(
    const std::string& path) {
  auto in = open_input(path);
  return read_features(in);
}

std::vector<Point> read_points(const std::string& path) {
  auto in = open_input(path);
  std::vector<Point> points;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    Point p;
    bool numeric = true;
    for (auto field : detail::split(line, ',')) {
      auto x = detail::parse_double(field);
      if (!x) {
        numeric = false;
        break;
      }
      if (!std::isfinite(*x)) throw ParseError(line_no, "coordinate", "not finite");
      p.push_back(*x);
    }
    if (!numeric) {
      // A single leading header row is allowed.
      if (line_no == 1) continue;
      throw ParseError(line_no, "coordinate", "not a number");
    }
    points.push_back(std::move(p));
  }
  return points;
}

std::vector<std::vector<double>> values_of(const std::vector<FeatureVector>& v) {
  std::vector<std::vector<double>> out;
  for (const auto& x : v) out.push_back(x.values);
  return out;
}

AutoencoderModel read_model(const std::string& path) {
  auto in = open_input(path);
  try {
    return load_model(in);
  } catch (const ParseError& e) {
    throw Error(path + ": " + e.what());
  }
}

std::vector<FeatureVector> denoise_all(const AutoencoderModel& m, std::vector<FeatureVector> v) {
  for (auto& x : v) x.values = m.denoise(x.values);
  return v;
}

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "key = value configuration file");
  cmd->add_option("--window-width", o.window_width, "window width in seconds");
  cmd->add_option("--max-eps", o.max_eps, "Rips scale cap");
  cmd->add_option("--capacity", o.capacity, "baseline size");
  cmd->add_option("--quantile", o.quantile, "calibration quantile in (0, 1]");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--out,-o", o.out, "output path, - for standard output");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hypergraph topology and persistent-homology anomaly detection for netflow"};
  app.failure_message(CLI::FailureMessage::help);
  app.require_subcommand(1);

  Overrides o;
  std::string input;
  std::string model_path;
  std::vector<std::size_t> scan_windows;
  std::optional<std::size_t> windows;
  int max_dim = 1;

  auto* synth = app.add_subcommand("synth", "emit synthetic flow CSV");
  add_common(synth, o);
  synth->add_option("--windows", windows, "number of windows to generate");
  synth->add_option("--scan", scan_windows, "window indices that receive a port scan");

  auto* ingest = app.add_subcommand("ingest", "flow CSV to windowed session CSV");
  add_common(ingest, o);
  ingest->add_option("input", input, "flow CSV")->required();

  auto* features = app.add_subcommand("features", "session CSV to feature-vector CSV");
  add_common(features, o);
  features->add_option("input", input, "windowed session CSV")->required();

  auto* topo = app.add_subcommand("topo", "per-window hypergraph, order and Betti statistics");
  add_common(topo, o);
  topo->add_option("input", input, "windowed session CSV")->required();

  auto* ph = app.add_subcommand("ph", "point-cloud CSV to persistence diagram CSV");
  add_common(ph, o);
  ph->add_option("input", input, "point cloud CSV, one point per row")->required();
  ph->add_option("--max-dim", max_dim, "highest homology dimension")->check(CLI::Range(0, 8));

  auto* detect = app.add_subcommand("detect", "feature CSV to JSON-lines anomaly reports");
  add_common(detect, o);
  detect->add_option("input", input, "feature CSV")->required();
  detect->add_option("--model", model_path, "denoise with this autoencoder first");

  auto* train_ae = app.add_subcommand("train-ae", "train an autoencoder on feature vectors");
  add_common(train_ae, o);
  train_ae->add_option("input", input, "feature CSV of normal windows")->required();

  auto* denoise = app.add_subcommand("denoise", "pass feature vectors through an autoencoder");
  add_common(denoise, o);
  denoise->add_option("input", input, "feature CSV")->required();
  denoise->add_option("--model", model_path, "model file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    auto cfg = load_config(o);

    if (synth->parsed()) {
      if (windows) cfg.windows = *windows;
      if (!scan_windows.empty()) cfg.scan_windows = scan_windows;
      const auto records = synthesize(cfg);
      emit(o.out, [&](std::ostream& out) { write_flows(out, records); });
    } else if (ingest->parsed()) {
      auto in = open_input(input);
      const auto sessions = pair_bidirectional(parse_flows(in));
      const auto w = window(sessions, cfg.window_width, cfg.origin);
      emit(o.out, [&](std::ostream& out) { write_windowed_sessions(out, w); });
    } else if (features->parsed()) {
      const auto w = read_sessions(input, cfg);
      const auto v = summarize_windows(w, cfg.features);
      const auto names = cfg.feature_names();
      emit(o.out, [&](std::ostream& out) { write_features(out, names, v); });
    } else if (topo->parsed()) {
      const auto w = read_sessions(input, cfg);
      emit(o.out, [&](std::ostream& out) {
        out << "window_start,n_vertices,n_edges,ecp_arcs,hasse_arcs,max_in_degree,"
               "max_out_degree,max_support_multiplicity,beta0,beta1\n";
        for (const auto& win : w) {
          const auto h = build_hypergraph(win);
          const auto st = stats(h);
          const auto ecp = build_ecp(h);
          const auto b = betti(order_complex(ecp, 2), 1).betti;
          out << detail::format_double(win.start) << ',' << st.n_vertices << ',' << st.n_edges
              << ',' << ecp.arcs().size() << ',' << hasse(ecp).arcs().size() << ','
              << ecp.max_in_degree() << ',' << ecp.max_out_degree() << ','
              << st.max_support_multiplicity << ',' << b[0] << ',' << b[1] << '\n';
        }
      });
    } else if (ph->parsed()) {
      const auto points = read_points(input);
      const auto d = barcode(vietoris_rips(points, cfg.detector.max_eps, max_dim));
      emit(o.out, [&](std::ostream& out) { write_diagram(out, d); });
    } else if (detect->parsed()) {
      auto [names, v] = read_feature_file(input);
      if (!model_path.empty()) cfg.ae_model_path = model_path;
      if (cfg.ae_model_path) v = denoise_all(read_model(*cfg.ae_model_path), std::move(v));
      const auto run = run_detection(v, cfg.detector, names);
      emit(o.out, [&](std::ostream& out) { write_reports(out, run.reports); });
    } else if (train_ae->parsed()) {
      const auto [names, v] = read_feature_file(input);
      if (v.empty()) throw Error("no feature vectors in '" + input + "'");
      const auto raw = values_of(v);
      const auto scaler = FeatureScaler::fit(raw);
      std::vector<std::vector<double>> scaled;
      for (const auto& x : raw) scaled.push_back(scaler.apply(x));
      const auto d = raw.front().size();
      auto train_cfg = cfg.ae_train;
      train_cfg.seed = cfg.seed;
      auto net = Mlp::glorot({d, cfg.ae_hidden, cfg.ae_bottleneck, cfg.ae_hidden, d}, cfg.seed);
      const AutoencoderModel m{train(std::move(net), scaled, train_cfg).model, scaler};
      emit(o.out, [&](std::ostream& out) { save_model(out, m); });
    } else if (denoise->parsed()) {
      auto [names, v] = read_feature_file(input);
      const auto cleaned = denoise_all(read_model(model_path), std::move(v));
      emit(o.out, [&](std::ostream& out) { write_features(out, names, cleaned); });
    }
  } catch (const std::exception& e) {
    std::cerr << "hgtop: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
