#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace permugibbs {

/// Position of a point in the bi-infinite ordering of a point set.
using Index = std::int64_t;

enum class PointSetKind { IntegerLattice, ScaledLattice, Poisson, Explicit };

std::string to_string(PointSetKind kind);

/// Closed coordinate interval [lo, hi].
struct Window {
  double lo = 0.0;
  double hi = 0.0;
};

/// Midpoint between two consecutive points x_j < x_{j+1}.
struct DualPoint {
  double value = 0.0;
  double left = 0.0;
  double right = 0.0;
  Index left_index = 0;  // j; the right neighbour is j + 1
};

struct RegularityConstants {
  double separation = 1.0;  // c_s(a, n)
  double growth = 0.0;      // c_g(a), possibly truncated
  double truncation_radius = 0.0;
  bool exact = false;
  bool still_growing = false;  // maximiser sits at the truncation edge
};

struct PointSetSpec {
  PointSetKind kind = PointSetKind::IntegerLattice;
  double spacing = 1.0;           // scaled lattice
  double rate = 1.0;              // poisson
  std::uint64_t seed = 0;         // poisson
  std::vector<double> listed;     // explicit, extended periodically by its gaps
};

namespace detail {
class PointGenerator;
}

/// Locally finite, bi-infinite set of reals indexed by Index in increasing
/// order. Cheap to copy; copies share the (internally synchronised) generator.
class PointSet {
 public:
  static PointSet integer_lattice();
  static PointSet scaled_lattice(double spacing);
  static PointSet poisson(double rate, std::uint64_t seed);
  /// At least two strictly increasing points; continued by repeating the
  /// listed gaps in both directions. at(0) is the first listed point.
  static PointSet periodic(std::vector<double> listed);
  static PointSet from_spec(const PointSetSpec& spec);

  PointSetKind kind() const;
  const PointSetSpec& spec() const;
  bool is_lattice() const;

  double at(Index i) const;
  /// Smallest i with at(i) > a.
  Index first_above(double a) const;
  /// Largest i with at(i) < a.
  Index last_below(double a) const;
  std::optional<Index> find(double x) const;

  /// All indices with at(i) in [lo, hi], increasing.
  std::vector<Index> indices_in(Window w) const;
  std::vector<double> points_in(Window w) const;

  /// The window fixed by generate(); empty for sets built directly.
  const std::vector<double>& materialized() const { return materialized_; }
  Window window() const { return window_; }

 private:
  friend PointSet generate(const PointSetSpec&, Window);
  explicit PointSet(std::shared_ptr<const detail::PointGenerator> gen);

  std::shared_ptr<const detail::PointGenerator> gen_;
  std::vector<double> materialized_;
  Window window_{};
};

/// Builds the point set and materialises its points inside `window`.
PointSet generate(const PointSetSpec& spec, Window window);

/// k-th point strictly right (k > 0) or left (k < 0) of a; a itself for k = 0,
/// which requires a to be a point of the set.
double index_from(const PointSet& ps, double a, Index k);

/// Index form of index_from.
Index index_offset(const PointSet& ps, double a, Index k);

std::vector<DualPoint> dual_points(const PointSet& ps, Window window);

/// The dual point between at(j) and at(j + 1).
DualPoint dual_at(const PointSet& ps, Index j);

/// Minimal c >= 1 such that consecutive points of
/// {a_{-|n|-1}, ..., a_{|n|+1}} keep distances in [1/c, c].
double separation_constant(const PointSet& ps, double a, Index n);

/// Minimal c with #{x : 0 < |x - a| <= t} <= c t for t in (0, T].
RegularityConstants growth_constant(const PointSet& ps, double a, double truncation);

}  // namespace permugibbs
