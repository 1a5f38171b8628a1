#include "hgtop/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <tuple>

#include "hgtop/error.hpp"
#include "hgtop/ingest.hpp"

namespace hgtop {

// --- PersistenceDiagram ---------------------------------------------------------

void PersistenceDiagram::add(std::size_t dim, PersistencePair bar) {
  if (!(bar.death > bar.birth)) return;
  if (bars_.size() <= dim) bars_.resize(dim + 1);
  auto& list = bars_[dim];
  list.insert(std::upper_bound(list.begin(), list.end(), bar), bar);
}

const std::vector<PersistencePair>& PersistenceDiagram::bars(std::size_t dim) const {
  static const std::vector<PersistencePair> kEmpty;
  return dim < bars_.size() ? bars_[dim] : kEmpty;
}

std::size_t PersistenceDiagram::infinite_count(std::size_t dim) const {
  const auto& list = bars(dim);
  return static_cast<std::size_t>(
      std::count_if(list.begin(), list.end(), [](const auto& b) { return b.is_infinite(); }));
}

PersistenceDiagram PersistenceDiagram::truncated(double cap) const {
  PersistenceDiagram out(bars_.size());
  for (std::size_t d = 0; d < bars_.size(); ++d) {
    for (auto bar : bars_[d]) {
      bar.death = std::min(bar.death, cap);
      out.add(d, bar);
    }
  }
  return out;
}

// --- Rips -------------------------------------------------------------------------

Filtration vietoris_rips(std::span<const Point> points, double max_eps, int max_dim) {
  if (points.empty()) throw Error("Rips filtration needs at least one point");
  if (max_dim < 0) throw Error("max_dim must be nonnegative");
  if (!(max_eps > 0.0)) throw Error("max_eps must be positive");
  const auto dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) throw Error("points have inconsistent dimension");
  }

  const auto n = points.size();
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < dim; ++c) {
        const double d = points[i][c] - points[j][c];
        s += d * d;
      }
      dist[i][j] = dist[j][i] = std::sqrt(s);
    }
  }

  Filtration f;
  f.homology_dim = max_dim;
  const auto max_size = static_cast<std::size_t>(max_dim) + 2;
  Simplex clique;
  std::function<void(std::size_t, double)> extend = [&](std::size_t from, double diameter) {
    for (std::size_t v = from; v < n; ++v) {
      double d = diameter;
      bool ok = true;
      for (int u : clique) {
        const double e = dist[static_cast<std::size_t>(u)][v];
        if (e > max_eps) {
          ok = false;
          break;
        }
        d = std::max(d, e);
      }
      if (!ok) continue;
      clique.push_back(static_cast<int>(v));
      f.entries.push_back({clique, d});
      if (clique.size() < max_size) extend(v + 1, d);
      clique.pop_back();
    }
  };
  extend(0, 0.0);

  std::sort(f.entries.begin(), f.entries.end(), [](const auto& a, const auto& b) {
    if (a.birth != b.birth) return a.birth < b.birth;
    if (a.vertices.size() != b.vertices.size()) return a.vertices.size() < b.vertices.size();
    return a.vertices < b.vertices;
  });
  return f;
}

// --- reduction --------------------------------------------------------------------

PersistenceDiagram barcode(const Filtration& f) {
  const auto& entries = f.entries;
  const auto n = entries.size();
  std::map<Simplex, std::size_t> position;
  std::vector<std::vector<std::size_t>> columns(n);

  for (std::size_t j = 0; j < n; ++j) {
    const auto& s = entries[j].vertices;
    if (s.empty() || !std::is_sorted(s.begin(), s.end()) ||
        std::adjacent_find(s.begin(), s.end()) != s.end()) {
      throw Error("filtration simplex must list strictly increasing vertices");
    }
    if (s.size() > 1) {
      for (std::size_t omit = 0; omit < s.size(); ++omit) {
        Simplex face;
        for (std::size_t i = 0; i < s.size(); ++i)
          if (i != omit) face.push_back(s[i]);
        auto it = position.find(face);
        if (it == position.end()) throw Error("invalid filtration: face missing or listed later");
        if (entries[it->second].birth > entries[j].birth) {
          throw Error("invalid filtration: face born after its coface");
        }
        columns[j].push_back(it->second);
      }
      std::sort(columns[j].begin(), columns[j].end());
    }
    if (!position.emplace(s, j).second) throw Error("invalid filtration: duplicate simplex");
  }

  constexpr auto kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> pivot_owner(n, kNone);
  std::vector<bool> paired(n, false);
  PersistenceDiagram diagram(static_cast<std::size_t>(std::max(f.homology_dim, 0)) + 1);
  const auto top = static_cast<std::size_t>(std::max(f.homology_dim, 0));

  std::vector<std::size_t> scratch;
  for (std::size_t j = 0; j < n; ++j) {
    auto& col = columns[j];
    while (!col.empty() && pivot_owner[col.back()] != kNone) {
      const auto& other = columns[pivot_owner[col.back()]];
      scratch.clear();
      std::set_symmetric_difference(col.begin(), col.end(), other.begin(), other.end(),
                                    std::back_inserter(scratch));
      col.swap(scratch);
    }
    if (!col.empty()) {
      const auto low = col.back();
      pivot_owner[low] = j;
      paired[low] = paired[j] = true;
      const auto dim = entries[low].vertices.size() - 1;
      if (dim <= top) diagram.add(dim, {entries[low].birth, entries[j].birth});
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (paired[i]) continue;
    const auto dim = entries[i].vertices.size() - 1;
    if (dim <= top) diagram.add(dim, {entries[i].birth, kInfinity});
  }
  return diagram;
}

// --- Wasserstein ------------------------------------------------------------------

std::vector<std::size_t> hungarian_assignment(const std::vector<std::vector<double>>& cost) {
  const auto n = cost.size();
  for (const auto& row : cost) {
    if (row.size() != n) throw Error("assignment cost matrix must be square");
  }
  // Shortest augmenting path formulation with row/column potentials; index 0
  // is a sentinel column.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, kInfinity);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const auto i0 = match[j0];
      double delta = kInfinity;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const auto j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> assignment(n);
  for (std::size_t j = 1; j <= n; ++j) assignment[match[j] - 1] = j - 1;
  return assignment;
}

double wasserstein(const PersistenceDiagram& a, const PersistenceDiagram& b, std::size_t dim,
                   double p) {
  if (!(p >= 1.0)) throw Error("Wasserstein order p must be >= 1");
  const auto& xs = a.bars(dim);
  const auto& ys = b.bars(dim);
  for (const auto* list : {&xs, &ys}) {
    for (const auto& bar : *list) {
      if (bar.is_infinite()) {
        throw Error("diagram has an infinite bar; truncate deaths before computing distances");
      }
    }
  }
  const auto n = xs.size();
  const auto m = ys.size();
  if (n + m == 0) return 0.0;

  auto power = [p](double c) { return p == 1.0 ? c : std::pow(c, p); };
  auto to_diagonal = [](const PersistencePair& x) { return (x.death - x.birth) / 2.0; };

  // Rows: points of `a`, then diagonal stand-ins for points of `b`.
  // Columns: points of `b`, then diagonal stand-ins for points of `a`.
  const auto size = n + m;
  std::vector<std::vector<double>> cost(size, std::vector<double>(size, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      cost[i][j] = power(std::max(std::abs(xs[i].birth - ys[j].birth),
                                  std::abs(xs[i].death - ys[j].death)));
    }
    for (std::size_t k = m; k < size; ++k) cost[i][k] = power(to_diagonal(xs[i]));
  }
  for (std::size_t r = n; r < size; ++r) {
    for (std::size_t j = 0; j < m; ++j) cost[r][j] = power(to_diagonal(ys[j]));
  }

  const auto assignment = hungarian_assignment(cost);
  double total = 0.0;
  for (std::size_t r = 0; r < size; ++r) total += cost[r][assignment[r]];
  return p == 1.0 ? total : std::pow(total, 1.0 / p);
}

// --- serialization ----------------------------------------------------------------

void write_diagram(std::ostream& out, const PersistenceDiagram& d) {
  out << "dim,birth,death\n";
  for (std::size_t k = 0; k < d.dimensions(); ++k) {
    for (const auto& bar : d.bars(k)) {
      out << k << ',' << detail::format_double(bar.birth) << ','
          << (bar.is_infinite() ? std::string("inf") : detail::format_double(bar.death)) << '\n';
    }
  }
}

PersistenceDiagram read_diagram(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "dim,birth,death") {
    throw ParseError(1, "header", "expected 'dim,birth,death'");
  }
  PersistenceDiagram d;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = detail::split(line, ',');
    if (f.size() != 3) throw ParseError(line_no, "line", "expected 3 fields");
    auto k = detail::parse_double(f[0]);
    auto birth = detail::parse_double(f[1]);
    auto death = detail::parse_double(f[2]);
    if (!k || *k < 0 || *k != std::floor(*k)) throw ParseError(line_no, "dim", "invalid");
    if (!birth || !std::isfinite(*birth)) throw ParseError(line_no, "birth", "invalid");
    if (!death || *death < *birth) throw ParseError(line_no, "death", "invalid");
    d.add(static_cast<std::size_t>(*k), {*birth, *death});
  }
  return d;
}

}  // namespace hgtop
