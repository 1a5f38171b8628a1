#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>

#include "hgtop/ingest.hpp"

namespace hgtop {

using PortLabel = std::uint16_t;

/// Source-IP / destination-port hypergraph of one time window. Vertices are
/// client IPs; each destination port labels an edge whose support is the set
/// of clients that contacted it. Only incidences are ever added, so every
/// vertex lies in some edge and no support is empty.
class Hypergraph {
 public:
  using Support = std::set<Ipv4>;

  void add_incidence(Ipv4 vertex, PortLabel edge);

  const std::set<Ipv4>& vertices() const { return vertices_; }
  const std::map<PortLabel, Support>& edges() const { return edges_; }

  std::size_t vertex_degree(Ipv4 v) const;
  bool empty() const { return edges_.empty(); }

  bool operator==(const Hypergraph&) const = default;

 private:
  std::set<Ipv4> vertices_;
  std::map<PortLabel, Support> edges_;
};

struct HypergraphStats {
  std::size_t n_vertices = 0;
  std::size_t n_edges = 0;
  std::size_t max_vertex_degree = 0;
  std::size_t max_edge_size = 0;
  double mean_edge_size = 0.0;
  /// Largest number of distinct edge labels sharing one identical support.
  std::size_t max_support_multiplicity = 0;

  bool operator==(const HypergraphStats&) const = default;
};

Hypergraph build_hypergraph(const TimeWindow& w);
HypergraphStats stats(const Hypergraph& h);

/// Debug dump: `port: ip1 ip2 ...` per edge, ports ascending, IPs sorted as text.
void dump(std::ostream& out, const Hypergraph& h);

}  // namespace hgtop
