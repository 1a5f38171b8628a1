#include "hgtop/topology.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <ostream>

#include "hgtop/error.hpp"

namespace hgtop {

namespace {

const std::vector<Simplex> kNoSimplices;

std::vector<Simplex> facets_of(const Simplex& s) {
  std::vector<Simplex> out;
  if (s.size() < 2) return out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    Simplex f;
    f.reserve(s.size() - 1);
    for (std::size_t j = 0; j < s.size(); ++j)
      if (j != i) f.push_back(s[j]);
    out.push_back(std::move(f));
  }
  return out;
}

// Rows of a GF(2) matrix packed 64 columns per word, reduced into an XOR
// basis keyed by leading bit.
class Gf2Basis {
 public:
  explicit Gf2Basis(std::size_t cols) : words_((cols + 63) / 64), pivots_(cols) {}

  bool insert(std::vector<std::uint64_t> row) {
    for (std::size_t w = words_; w-- > 0;) {
      while (row[w] != 0) {
        const std::size_t bit = w * 64 + 63 - static_cast<std::size_t>(std::countl_zero(row[w]));
        auto& pivot = pivots_[bit];
        if (pivot.empty()) {
          pivot = std::move(row);
          ++rank_;
          return true;
        }
        for (std::size_t i = 0; i <= w; ++i) row[i] ^= pivot[i];
      }
    }
    return false;
  }

  std::size_t rank() const { return rank_; }
  std::size_t words() const { return words_; }

 private:
  std::size_t words_;
  std::vector<std::vector<std::uint64_t>> pivots_;
  std::size_t rank_ = 0;
};

}  // namespace

// --- Ecp ---------------------------------------------------------------------

Ecp::Ecp(std::size_t n, std::set<Arc> arcs, std::vector<PortLabel> labels)
    : n_(n), arcs_(std::move(arcs)), labels_(std::move(labels)) {
  for (const auto& [a, b] : arcs_) {
    if (a >= n_ || b >= n_) throw Error("arc endpoint out of range");
    if (a == b) throw Error("self-loop in edge-containment relation");
  }
  if (!labels_.empty() && labels_.size() != n_) throw Error("label count differs from node count");
}

std::size_t Ecp::in_degree(std::size_t node) const {
  return static_cast<std::size_t>(
      std::count_if(arcs_.begin(), arcs_.end(), [&](const Arc& a) { return a.second == node; }));
}

std::size_t Ecp::out_degree(std::size_t node) const {
  return static_cast<std::size_t>(
      std::count_if(arcs_.begin(), arcs_.end(), [&](const Arc& a) { return a.first == node; }));
}

std::size_t Ecp::max_in_degree() const {
  std::vector<std::size_t> d(n_, 0);
  for (const auto& a : arcs_) ++d[a.second];
  return d.empty() ? 0 : *std::max_element(d.begin(), d.end());
}

std::size_t Ecp::max_out_degree() const {
  std::vector<std::size_t> d(n_, 0);
  for (const auto& a : arcs_) ++d[a.first];
  return d.empty() ? 0 : *std::max_element(d.begin(), d.end());
}

std::vector<std::vector<bool>> Ecp::reachability() const {
  std::vector<std::vector<std::size_t>> succ(n_);
  std::vector<std::size_t> indeg(n_, 0);
  for (const auto& [a, b] : arcs_) {
    succ[a].push_back(b);
    ++indeg[b];
  }
  // Kahn's algorithm; reverse topological order lets each node inherit the
  // reach sets of its successors.
  std::vector<std::size_t> order;
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < n_; ++i)
    if (indeg[i] == 0) stack.push_back(i);
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (auto w : succ[v])
      if (--indeg[w] == 0) stack.push_back(w);
  }
  if (order.size() != n_) throw Error("edge-containment relation has a cycle");

  std::vector<std::vector<bool>> reach(n_, std::vector<bool>(n_, false));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    for (auto w : succ[*it]) {
      reach[*it][w] = true;
      for (std::size_t x = 0; x < n_; ++x)
        if (reach[w][x]) reach[*it][x] = true;
    }
  }
  return reach;
}

bool Ecp::is_strict_partial_order() const {
  try {
    auto reach = reachability();
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        if (reach[i][j] && !has_arc(i, j)) return false;
    return true;
  } catch (const Error&) {
    return false;
  }
}

Ecp build_ecp(const Hypergraph& h) {
  std::vector<PortLabel> labels;
  std::vector<const Hypergraph::Support*> supports;
  for (const auto& [label, support] : h.edges()) {
    labels.push_back(label);
    supports.push_back(&support);
  }
  std::set<Ecp::Arc> arcs;
  for (std::size_t e = 0; e < supports.size(); ++e) {
    for (std::size_t f = 0; f < supports.size(); ++f) {
      if (e == f || supports[e]->size() >= supports[f]->size()) continue;
      if (std::includes(supports[f]->begin(), supports[f]->end(), supports[e]->begin(),
                        supports[e]->end())) {
        arcs.insert({e, f});
      }
    }
  }
  const auto n = labels.size();
  return Ecp(n, std::move(arcs), std::move(labels));
}

Ecp hasse(const Ecp& ecp) {
  const auto reach = ecp.reachability();
  const auto n = ecp.size();
  std::set<Ecp::Arc> kept;
  for (const auto& [e, f] : ecp.arcs()) {
    bool shortcut = false;
    for (std::size_t g = 0; g < n && !shortcut; ++g) shortcut = reach[e][g] && reach[g][f];
    if (!shortcut) kept.insert({e, f});
  }
  return Ecp(n, std::move(kept), ecp.labels());
}

SimplicialComplex order_complex(const Ecp& ecp, int max_dim) {
  const auto reach = ecp.reachability();
  const auto n = ecp.size();
  std::vector<Simplex> chains;
  Simplex chain;
  // Every chain is a set of pairwise comparable nodes; grow it only with
  // nodes comparable to all members, taking nodes in increasing index so each
  // set is produced once.
  std::function<void(std::size_t)> grow = [&](std::size_t from) {
    for (std::size_t v = from; v < n; ++v) {
      bool comparable = std::all_of(chain.begin(), chain.end(), [&](int u) {
        return reach[static_cast<std::size_t>(u)][v] || reach[v][static_cast<std::size_t>(u)];
      });
      if (!comparable) continue;
      chain.push_back(static_cast<int>(v));
      chains.push_back(chain);
      if (max_dim < 0 || static_cast<int>(chain.size()) <= max_dim) grow(v + 1);
      chain.pop_back();
    }
  };
  grow(0);
  return SimplicialComplex::from_simplices(std::move(chains));
}

// --- SimplicialComplex ----------------------------------------------------------

SimplicialComplex SimplicialComplex::from_simplices(std::vector<Simplex> simplices) {
  SimplicialComplex k;
  for (auto& s : simplices) {
    if (s.empty()) throw Error("empty simplex");
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) {
      throw Error("simplex repeats a vertex");
    }
    const auto dim = s.size() - 1;
    if (k.by_dim_.size() <= dim) k.by_dim_.resize(dim + 1);
    k.by_dim_[dim].push_back(std::move(s));
  }
  for (auto& level : k.by_dim_) {
    std::sort(level.begin(), level.end());
    level.erase(std::unique(level.begin(), level.end()), level.end());
  }
  for (int d = 1; d <= k.dimension(); ++d) {
    for (const auto& s : k.simplices(d)) {
      for (const auto& f : facets_of(s)) {
        if (!k.index_of(f)) throw Error("simplex set is not closed under faces");
      }
    }
  }
  return k;
}

SimplicialComplex SimplicialComplex::closure_of(const std::vector<Simplex>& facets) {
  std::set<Simplex> all;
  std::vector<Simplex> stack = facets;
  while (!stack.empty()) {
    auto s = std::move(stack.back());
    stack.pop_back();
    std::sort(s.begin(), s.end());
    if (!all.insert(s).second) continue;
    for (auto& f : facets_of(s)) stack.push_back(std::move(f));
  }
  return from_simplices({all.begin(), all.end()});
}

const std::vector<Simplex>& SimplicialComplex::simplices(int k) const {
  if (k < 0 || k > dimension()) return kNoSimplices;
  return by_dim_[static_cast<std::size_t>(k)];
}

std::size_t SimplicialComplex::total_count() const {
  std::size_t n = 0;
  for (const auto& level : by_dim_) n += level.size();
  return n;
}

std::optional<std::size_t> SimplicialComplex::index_of(const Simplex& s) const {
  const auto& level = simplices(static_cast<int>(s.size()) - 1);
  auto it = std::lower_bound(level.begin(), level.end(), s);
  if (it == level.end() || *it != s) return std::nullopt;
  return static_cast<std::size_t>(it - level.begin());
}

// --- homology -------------------------------------------------------------------

std::size_t boundary_rank_gf2(const SimplicialComplex& k, int dim) {
  if (dim <= 0 || dim > k.dimension()) return 0;
  Gf2Basis basis(k.count(dim - 1));
  for (const auto& s : k.simplices(dim)) {
    std::vector<std::uint64_t> row(basis.words(), 0);
    for (const auto& f : facets_of(s)) {
      const auto idx = *k.index_of(f);
      row[idx / 64] ^= std::uint64_t{1} << (idx % 64);
    }
    basis.insert(std::move(row));
  }
  return basis.rank();
}

BettiVector betti(const SimplicialComplex& k, int max_dim) {
  if (max_dim < 0) throw Error("max_dim must be nonnegative");
  BettiVector out;
  std::size_t rank_below = 0;  // rank of the boundary leaving dimension d
  for (int d = 0; d <= max_dim; ++d) {
    const auto rank_above = boundary_rank_gf2(k, d + 1);
    out.betti.push_back(k.count(d) - rank_below - rank_above);
    rank_below = rank_above;
  }
  return out;
}

Matrix boundary_matrix(const SimplicialComplex& k, int dim) {
  Matrix b(k.count(dim - 1), k.count(dim));
  if (dim <= 0) return b;
  const auto& level = k.simplices(dim);
  for (std::size_t col = 0; col < level.size(); ++col) {
    auto faces = facets_of(level[col]);
    for (std::size_t i = 0; i < faces.size(); ++i) {
      b(*k.index_of(faces[i]), col) = (i % 2 == 0) ? 1.0 : -1.0;
    }
  }
  return b;
}

HodgeLaplacian hodge(const SimplicialComplex& k, int dim) {
  if (dim < 0 || dim > k.dimension()) throw Error("Hodge Laplacian dimension out of range");
  const auto n = k.count(dim);
  Matrix l(n, n);
  if (dim > 0) {
    const auto b = boundary_matrix(k, dim);
    l = l + b.transposed() * b;
  }
  if (dim < k.dimension()) {
    const auto b = boundary_matrix(k, dim + 1);
    l = l + b * b.transposed();
  }
  return HodgeLaplacian{dim, std::move(l)};
}

std::vector<double> spectrum(const HodgeLaplacian& l) { return symmetric_eigenvalues(l.matrix); }

void dump(std::ostream& out, const SimplicialComplex& k) {
  for (int d = 0; d <= k.dimension(); ++d) {
    for (const auto& s : k.simplices(d)) {
      for (std::size_t i = 0; i < s.size(); ++i) out << (i ? " " : "") << s[i];
      out << '\n';
    }
  }
}

}  // namespace hgtop
