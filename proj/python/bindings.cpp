// Python bindings for the hgtop core.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "hgtop/autoencoder.hpp"
#include "hgtop/detector.hpp"
#include "hgtop/error.hpp"
#include "hgtop/hypergraph.hpp"
#include "hgtop/ingest.hpp"
#include "hgtop/persistence.hpp"
#include "hgtop/pipeline.hpp"
#include "hgtop/synth.hpp"
#include "hgtop/topology.hpp"

namespace py = pybind11;
using namespace hgtop;

namespace {

template <class T, class F>
std::string to_text(const T& value, F&& writer) {
  std::ostringstream out;
  writer(out, value);
  return out.str();
}

std::vector<Feature> features_from_names(const std::vector<std::string>& names) {
  std::vector<Feature> out;
  for (const auto& n : names) {
    auto f = feature_from_name(n);
    if (!f) throw Error("unknown feature '" + n + "'");
    out.push_back(*f);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Netflow hypergraph topology and persistence-based anomaly detection";

  auto error = py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", error.ptr());

  // ingest
  py::class_<Ipv4>(m, "Ipv4")
      .def(py::init([](const std::string& text) {
        auto ip = Ipv4::parse(text);
        if (!ip) throw Error("bad IPv4 address '" + text + "'");
        return *ip;
      }))
      .def_readonly("bits", &Ipv4::bits)
      .def("__str__", &Ipv4::str)
      .def("__repr__", [](const Ipv4& ip) { return "Ipv4('" + ip.str() + "')"; })
      .def("__eq__", [](const Ipv4& a, const Ipv4& b) { return a == b; })
      .def("__lt__", [](const Ipv4& a, const Ipv4& b) { return a < b; })
      .def("__hash__", [](const Ipv4& ip) { return ip.bits; });
  py::implicitly_convertible<std::string, Ipv4>();

  py::class_<FlowRecord>(m, "FlowRecord")
      .def(py::init<>())
      .def_readwrite("s_time", &FlowRecord::s_time)
      .def_readwrite("e_time", &FlowRecord::e_time)
      .def_readwrite("s_ip", &FlowRecord::s_ip)
      .def_readwrite("d_ip", &FlowRecord::d_ip)
      .def_readwrite("s_port", &FlowRecord::s_port)
      .def_readwrite("d_port", &FlowRecord::d_port)
      .def_readwrite("flags", &FlowRecord::flags)
      .def("__eq__", [](const FlowRecord& a, const FlowRecord& b) { return a == b; });

  py::class_<SessionRecord>(m, "SessionRecord")
      .def_readonly("client_ip", &SessionRecord::client_ip)
      .def_readonly("server_ip", &SessionRecord::server_ip)
      .def_readonly("client_port", &SessionRecord::client_port)
      .def_readonly("server_port", &SessionRecord::server_port)
      .def_readonly("start", &SessionRecord::start)
      .def_readonly("end", &SessionRecord::end)
      .def_readonly("constituent_count", &SessionRecord::constituent_count);

  py::class_<TimeWindow>(m, "TimeWindow")
      .def_readonly("start", &TimeWindow::start)
      .def_readonly("width", &TimeWindow::width)
      .def_readonly("sessions", &TimeWindow::sessions);

  m.def("parse_flows", py::overload_cast<std::string_view>(&parse_flows), py::arg("text"),
        "Parse flow CSV text into records.");
  m.def("write_flows", [](const std::vector<FlowRecord>& r) {
    return to_text(r, [](std::ostream& o, const auto& v) { write_flows(o, v); });
  });
  m.def("pair_bidirectional", &pair_bidirectional, py::arg("records"));
  m.def(
      "window",
      [](const std::vector<SessionRecord>& s, double width, double origin) {
        return window(s, width, origin);
      },
      py::arg("sessions"), py::arg("width"), py::arg("origin") = 0.0);

  // hypergraph
  py::class_<Hypergraph>(m, "Hypergraph")
      .def_property_readonly("vertices", &Hypergraph::vertices)
      .def_property_readonly("edges", &Hypergraph::edges)
      .def("vertex_degree", &Hypergraph::vertex_degree);

  py::class_<HypergraphStats>(m, "HypergraphStats")
      .def_readonly("n_vertices", &HypergraphStats::n_vertices)
      .def_readonly("n_edges", &HypergraphStats::n_edges)
      .def_readonly("max_vertex_degree", &HypergraphStats::max_vertex_degree)
      .def_readonly("max_edge_size", &HypergraphStats::max_edge_size)
      .def_readonly("mean_edge_size", &HypergraphStats::mean_edge_size)
      .def_readonly("max_support_multiplicity", &HypergraphStats::max_support_multiplicity);

  m.def("build_hypergraph", &build_hypergraph, py::arg("window"));
  m.def("stats", &stats, py::arg("hypergraph"));

  // topology
  py::class_<Ecp>(m, "Ecp")
      .def(py::init<std::size_t, std::set<Ecp::Arc>, std::vector<PortLabel>>(), py::arg("n"),
           py::arg("arcs"), py::arg("labels") = std::vector<PortLabel>{})
      .def("__len__", &Ecp::size)
      .def_property_readonly("arcs", &Ecp::arcs)
      .def_property_readonly("labels", &Ecp::labels)
      .def("in_degree", &Ecp::in_degree)
      .def("out_degree", &Ecp::out_degree)
      .def("max_in_degree", &Ecp::max_in_degree)
      .def("max_out_degree", &Ecp::max_out_degree)
      .def("is_strict_partial_order", &Ecp::is_strict_partial_order);

  py::class_<SimplicialComplex>(m, "SimplicialComplex")
      .def_static("from_simplices", &SimplicialComplex::from_simplices)
      .def_static("closure_of", &SimplicialComplex::closure_of)
      .def_property_readonly("dimension", &SimplicialComplex::dimension)
      .def("simplices", &SimplicialComplex::simplices)
      .def("count", &SimplicialComplex::count);

  py::class_<HodgeLaplacian>(m, "HodgeLaplacian")
      .def_readonly("k", &HodgeLaplacian::k)
      .def("matrix", [](const HodgeLaplacian& l) {
        std::vector<std::vector<double>> rows(l.matrix.rows(),
                                              std::vector<double>(l.matrix.cols()));
        for (std::size_t i = 0; i < l.matrix.rows(); ++i)
          for (std::size_t j = 0; j < l.matrix.cols(); ++j) rows[i][j] = l.matrix(i, j);
        return rows;
      });

  m.def("build_ecp", &build_ecp, py::arg("hypergraph"));
  m.def("hasse", &hasse, py::arg("ecp"));
  m.def("order_complex", &order_complex, py::arg("ecp"), py::arg("max_dim") = -1);
  m.def(
      "betti", [](const SimplicialComplex& k, int max_dim) { return betti(k, max_dim).betti; },
      py::arg("complex"), py::arg("max_dim"));
  m.def("hodge", &hodge, py::arg("complex"), py::arg("dim"));
  m.def("spectrum", &spectrum, py::arg("laplacian"));

  // persistence
  py::class_<FiltrationEntry>(m, "FiltrationEntry")
      .def_readonly("vertices", &FiltrationEntry::vertices)
      .def_readonly("birth", &FiltrationEntry::birth);

  py::class_<Filtration>(m, "Filtration")
      .def_readonly("entries", &Filtration::entries)
      .def_readonly("homology_dim", &Filtration::homology_dim);

  py::class_<PersistenceDiagram>(m, "PersistenceDiagram")
      .def_property_readonly("dimensions", &PersistenceDiagram::dimensions)
      .def("bars",
           [](const PersistenceDiagram& d, std::size_t dim) {
             std::vector<std::pair<double, double>> out;
             for (const auto& b : d.bars(dim)) out.emplace_back(b.birth, b.death);
             return out;
           })
      .def("infinite_count", &PersistenceDiagram::infinite_count)
      .def("truncated", &PersistenceDiagram::truncated)
      .def("to_csv", [](const PersistenceDiagram& d) {
        return to_text(d, [](std::ostream& o, const auto& v) { write_diagram(o, v); });
      });

  m.def(
      "vietoris_rips",
      [](const std::vector<Point>& points, double max_eps, int max_dim) {
        return vietoris_rips(points, max_eps, max_dim);
      },
      py::arg("points"), py::arg("max_eps"), py::arg("max_dim") = 1);
  m.def("barcode", &barcode, py::arg("filtration"));
  m.def("wasserstein", &wasserstein, py::arg("a"), py::arg("b"), py::arg("dim"),
        py::arg("p") = 1.0);

  // detector
  m.def("default_feature_names", [] {
    std::vector<std::string> out;
    for (auto f : default_features()) out.emplace_back(feature_name(f));
    return out;
  });

  py::class_<FeatureVector>(m, "FeatureVector")
      .def(py::init([](double start, std::vector<double> values) {
             return FeatureVector{start, std::move(values)};
           }),
           py::arg("window_start"), py::arg("values"))
      .def_readwrite("window_start", &FeatureVector::window_start)
      .def_readwrite("values", &FeatureVector::values);

  m.def(
      "summarize_window",
      [](const TimeWindow& w, std::optional<std::vector<std::string>> names) {
        if (!names) return summarize_window(w);
        const auto f = features_from_names(*names);
        return summarize_window(w, f);
      },
      py::arg("window"), py::arg("features") = py::none());

  py::class_<DetectorParams>(m, "DetectorParams")
      .def(py::init<>())
      .def_readwrite("capacity", &DetectorParams::capacity)
      .def_readwrite("max_eps", &DetectorParams::max_eps)
      .def_readwrite("max_dim", &DetectorParams::max_dim)
      .def_readwrite("quantile", &DetectorParams::quantile)
      .def_readwrite("slack", &DetectorParams::slack)
      .def_readwrite("p", &DetectorParams::p);

  py::class_<AnomalyReport>(m, "AnomalyReport")
      .def_readonly("window_start", &AnomalyReport::window_start)
      .def_readonly("score", &AnomalyReport::score)
      .def_readonly("threshold", &AnomalyReport::threshold)
      .def_readonly("anomalous", &AnomalyReport::anomalous)
      .def_readonly("attribution", &AnomalyReport::attribution)
      .def("to_json", &AnomalyReport::to_json);

  py::class_<Baseline>(m, "Baseline")
      .def_static(
          "init",
          [](const std::vector<FeatureVector>& v, const DetectorParams& p,
             std::vector<std::string> names) { return Baseline::init(v, p, std::move(names)); },
          py::arg("vectors"), py::arg("params") = DetectorParams{},
          py::arg("names") = std::vector<std::string>{})
      .def_property_readonly("points",
                             [](const Baseline& b) {
                               return std::vector<Point>(b.points().begin(), b.points().end());
                             })
      .def_property_readonly("diagram", &Baseline::diagram)
      .def("score", &Baseline::score)
      .def("calibrate_threshold", py::overload_cast<double>(&Baseline::calibrate_threshold, py::const_))
      .def("attribute", &Baseline::attribute)
      .def("step", &Baseline::step, py::arg("vector"), py::arg("threshold"));

  py::class_<DetectionRun>(m, "DetectionRun")
      .def_readonly("reports", &DetectionRun::reports)
      .def_readonly("threshold", &DetectionRun::threshold)
      .def_readonly("initial", &DetectionRun::initial)
      .def_readonly("final", &DetectionRun::final);

  m.def(
      "run_detection",
      [](const std::vector<FeatureVector>& v, const DetectorParams& p,
         std::optional<std::vector<std::string>> names) {
        std::vector<std::string> n;
        if (names) n = *names;
        else
          for (auto f : default_features()) n.emplace_back(feature_name(f));
        return run_detection(v, p, std::move(n));
      },
      py::arg("vectors"), py::arg("params") = DetectorParams{}, py::arg("names") = py::none());

  // autoencoder
  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("momentum", &TrainConfig::momentum)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("seed", &TrainConfig::seed);

  py::class_<Mlp>(m, "Mlp")
      .def(py::init<std::vector<std::size_t>>(), py::arg("sizes"))
      .def_static(
          "glorot",
          [](std::vector<std::size_t> sizes, std::uint64_t seed) {
            return Mlp::glorot(std::move(sizes), seed);
          },
          py::arg("sizes"), py::arg("seed"))
      .def_property_readonly("sizes", &Mlp::sizes)
      .def("forward", [](const Mlp& net, const std::vector<double>& x) { return net.forward(x); })
      .def("latent", [](const Mlp& net, const std::vector<double>& x) { return net.latent(x); })
      .def("loss", [](const Mlp& net, const std::vector<std::vector<double>>& batch) {
        return net.loss(batch);
      });

  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("model", &TrainResult::model)
      .def_readonly("loss_history", &TrainResult::loss_history);

  m.def(
      "train",
      [](Mlp net, const std::vector<std::vector<double>>& data, const TrainConfig& cfg) {
        return train(std::move(net), data, cfg);
      },
      py::arg("model"), py::arg("data"), py::arg("config") = TrainConfig{});
  m.def("reconstruction_error", [](const Mlp& net, const std::vector<double>& x) {
    return reconstruction_error(net, x);
  });
  m.def("calibrate_detection_threshold",
        [](const Mlp& net, const std::vector<std::vector<double>>& normal) {
          return calibrate_detection_threshold(net, normal);
        });
  m.def("detect", [](const Mlp& net, const std::vector<double>& x, double threshold) {
    return detect(net, x, threshold);
  });
  m.def("denoise", [](const Mlp& net, const std::vector<double>& x) { return denoise(net, x); });

  // synthesis and configuration
  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("window_width", &RunConfig::window_width)
      .def_readwrite("detector", &RunConfig::detector)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("windows", &RunConfig::windows)
      .def_readwrite("scan_windows", &RunConfig::scan_windows)
      .def_readwrite("scan_port_lo", &RunConfig::scan_port_lo)
      .def_readwrite("scan_port_hi", &RunConfig::scan_port_hi)
      .def("feature_names", &RunConfig::feature_names);

  m.def(
      "parse_config",
      [](const std::string& text) {
        std::istringstream in(text);
        return parse_config(in);
      },
      py::arg("text"));
  m.def("synthesize", &synthesize, py::arg("config"));
  m.def(
      "summarize_windows",
      [](const std::vector<TimeWindow>& w, const RunConfig& cfg) {
        return summarize_windows(w, cfg.features);
      },
      py::arg("windows"), py::arg("config") = RunConfig{});
}
