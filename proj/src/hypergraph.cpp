#include "hgtop/hypergraph.hpp"

#include <algorithm>
#include <ostream>
#include <string>
#include <vector>

namespace hgtop {

void Hypergraph::add_incidence(Ipv4 vertex, PortLabel edge) {
  vertices_.insert(vertex);
  edges_[edge].insert(vertex);
}

std::size_t Hypergraph::vertex_degree(Ipv4 v) const {
  std::size_t d = 0;
  for (const auto& [label, support] : edges_) d += support.count(v);
  return d;
}

Hypergraph build_hypergraph(const TimeWindow& w) {
  Hypergraph h;
  for (const auto& s : w.sessions) h.add_incidence(s.client_ip, s.server_port);
  return h;
}

HypergraphStats stats(const Hypergraph& h) {
  HypergraphStats st;
  st.n_vertices = h.vertices().size();
  st.n_edges = h.edges().size();
  if (st.n_edges == 0) return st;

  std::map<Ipv4, std::size_t> degree;
  std::map<Hypergraph::Support, std::size_t> multiplicity;
  std::size_t total = 0;
  for (const auto& [label, support] : h.edges()) {
    st.max_edge_size = std::max(st.max_edge_size, support.size());
    total += support.size();
    for (auto v : support) ++degree[v];
    st.max_support_multiplicity = std::max(st.max_support_multiplicity, ++multiplicity[support]);
  }
  for (const auto& [v, d] : degree) st.max_vertex_degree = std::max(st.max_vertex_degree, d);
  st.mean_edge_size = static_cast<double>(total) / static_cast<double>(st.n_edges);
  return st;
}

void dump(std::ostream& out, const Hypergraph& h) {
  for (const auto& [label, support] : h.edges()) {
    std::vector<std::string> ips;
    for (auto v : support) ips.push_back(v.str());
    std::sort(ips.begin(), ips.end());
    out << label << ':';
    for (const auto& ip : ips) out << ' ' << ip;
    out << '\n';
  }
}

}  // namespace hgtop
