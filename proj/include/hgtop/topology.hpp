#pragma once

// Combinatorial topology of window hypergraphs: the edge-containment partial
// order, its Hasse diagram, the order complex (restricted barycentric
// subdivision), GF(2) Betti numbers and Hodge Laplacians.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "hgtop/hypergraph.hpp"
#include "hgtop/linalg.hpp"

namespace hgtop {

/// Sorted, strictly increasing vertex indices.
using Simplex = std::vector<int>;

/// A directed relation on nodes 0..n-1. As produced by build_ecp it is a
/// strict partial order; `hasse` output is its transitive reduction.
class Ecp {
 public:
  using Arc = std::pair<std::size_t, std::size_t>;

  Ecp() = default;
  /// Throws if an arc is a self-loop or names a node >= n.
  Ecp(std::size_t n, std::set<Arc> arcs, std::vector<PortLabel> labels = {});

  std::size_t size() const { return n_; }
  const std::set<Arc>& arcs() const { return arcs_; }
  /// Edge labels per node; empty for relations built without a hypergraph.
  const std::vector<PortLabel>& labels() const { return labels_; }

  bool has_arc(std::size_t from, std::size_t to) const { return arcs_.count({from, to}) != 0; }
  std::size_t in_degree(std::size_t node) const;
  std::size_t out_degree(std::size_t node) const;
  std::size_t max_in_degree() const;
  std::size_t max_out_degree() const;

  /// reach[i][j] is true when a directed path of length >= 1 runs i -> j.
  /// Throws if the relation has a cycle.
  std::vector<std::vector<bool>> reachability() const;
  bool is_strict_partial_order() const;

  bool operator==(const Ecp&) const = default;

 private:
  std::size_t n_ = 0;
  std::set<Arc> arcs_;
  std::vector<PortLabel> labels_;
};

class SimplicialComplex {
 public:
  SimplicialComplex() = default;

  /// Takes an explicit simplex list; sorts and deduplicates vertex tuples and
  /// throws unless the set is closed under taking faces.
  static SimplicialComplex from_simplices(std::vector<Simplex> simplices);
  /// The smallest complex containing every given simplex.
  static SimplicialComplex closure_of(const std::vector<Simplex>& facets);

  /// Highest stored dimension, -1 for the empty complex.
  int dimension() const { return static_cast<int>(by_dim_.size()) - 1; }
  /// k-simplices in lexicographic order; empty span for k outside the range.
  const std::vector<Simplex>& simplices(int k) const;
  std::size_t count(int k) const { return simplices(k).size(); }
  std::size_t total_count() const;
  std::optional<std::size_t> index_of(const Simplex& s) const;

  bool operator==(const SimplicialComplex&) const = default;

 private:
  std::vector<std::vector<Simplex>> by_dim_;
};

struct BettiVector {
  std::vector<std::size_t> betti;
  bool operator==(const BettiVector&) const = default;
};

struct HodgeLaplacian {
  int k = 0;
  Matrix matrix;
};

/// Arcs e -> f whenever support(e) is a proper subset of support(f).
Ecp build_ecp(const Hypergraph& h);

/// Transitive reduction: arc (e, f) survives iff no path e -> g -> ... -> f
/// of length >= 2 exists. Throws on cyclic input.
Ecp hasse(const Ecp& ecp);

/// Chains e0 < e1 < ... < ek of the transitive closure, as k-simplices.
/// `max_dim` caps the simplex dimension (negative means unbounded).
SimplicialComplex order_complex(const Ecp& ecp, int max_dim = -1);

/// GF(2) Betti numbers for dimensions 0..max_dim.
BettiVector betti(const SimplicialComplex& k, int max_dim);

/// GF(2) rank of the boundary map from k-simplices to (k-1)-simplices.
std::size_t boundary_rank_gf2(const SimplicialComplex& k, int dim);

/// Signed real boundary matrix of shape n_{k-1} x n_k; face i of a simplex
/// (the one omitting vertex position i) gets sign (-1)^i.
Matrix boundary_matrix(const SimplicialComplex& k, int dim);

/// L_k = B_k^T B_k + B_{k+1} B_{k+1}^T. Throws if k is outside 0..dimension.
HodgeLaplacian hodge(const SimplicialComplex& k, int dim);

std::vector<double> spectrum(const HodgeLaplacian& l);

/// One simplex per line, dimension-ascending then lexicographic.
void dump(std::ostream& out, const SimplicialComplex& k);

}  // namespace hgtop
