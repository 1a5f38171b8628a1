#pragma once

// Vietoris-Rips filtrations, GF(2) persistent homology by boundary-matrix
// column reduction, and p-Wasserstein distance between persistence diagrams.

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "hgtop/topology.hpp"

namespace hgtop {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

using Point = std::vector<double>;

struct FiltrationEntry {
  Simplex vertices;
  double birth = 0.0;
  bool operator==(const FiltrationEntry&) const = default;
};

/// Simplices in insertion order with their birth values. `homology_dim` is
/// the highest dimension whose bars are reported by `barcode`; a Rips
/// filtration stores simplices one dimension higher so those bars can die.
struct Filtration {
  std::vector<FiltrationEntry> entries;
  int homology_dim = 0;
};

struct PersistencePair {
  double birth = 0.0;
  double death = kInfinity;

  double persistence() const { return death - birth; }
  bool is_infinite() const { return death == kInfinity; }
  auto operator<=>(const PersistencePair&) const = default;
};

/// Bars grouped by homology dimension, kept in (birth, death) order.
/// Zero-persistence pairs are never stored.
class PersistenceDiagram {
 public:
  PersistenceDiagram() = default;
  explicit PersistenceDiagram(std::size_t dims) : bars_(dims) {}

  void add(std::size_t dim, PersistencePair bar);
  std::size_t dimensions() const { return bars_.size(); }
  const std::vector<PersistencePair>& bars(std::size_t dim) const;
  std::size_t infinite_count(std::size_t dim) const;

  /// Copy with every death above `cap` (including infinity) replaced by
  /// `cap`; bars collapsing to zero persistence are dropped.
  PersistenceDiagram truncated(double cap) const;

  bool operator==(const PersistenceDiagram&) const = default;

 private:
  std::vector<std::vector<PersistencePair>> bars_;
};

/// Rips filtration: vertex births 0, simplex birth = diameter (largest
/// pairwise Euclidean distance), only edges of length <= max_eps, simplices
/// up to dimension max_dim + 1. Entries are sorted by (birth, dim, vertices).
Filtration vietoris_rips(std::span<const Point> points, double max_eps, int max_dim);

/// Standard left-to-right column reduction. Throws if a face is missing,
/// appears later, or is born after its coface.
PersistenceDiagram barcode(const Filtration& f);

/// p-Wasserstein distance between the dimension-`dim` parts of two diagrams
/// under the L-infinity ground metric, with diagonal projections costing
/// half the persistence. Throws if either side holds an infinite bar.
double wasserstein(const PersistenceDiagram& a, const PersistenceDiagram& b, std::size_t dim,
                   double p = 1.0);

/// Minimum-cost perfect assignment on a square cost matrix (Hungarian method,
/// O(n^3)). Returns the column assigned to each row.
std::vector<std::size_t> hungarian_assignment(const std::vector<std::vector<double>>& cost);

/// CSV `dim,birth,death` with `inf` for unbounded deaths.
void write_diagram(std::ostream& out, const PersistenceDiagram& d);
PersistenceDiagram read_diagram(std::istream& in);

}  // namespace hgtop
