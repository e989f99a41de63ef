#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "permugibbs/pointset.hpp"

namespace permugibbs {

/// Inclusive range of point indices.
struct IndexRange {
  Index lo = 0;
  Index hi = -1;

  Index size() const { return hi < lo ? 0 : hi - lo + 1; }
  bool contains(Index i) const { return i >= lo && i <= hi; }
  bool operator==(const IndexRange&) const = default;
};

/// Finite set of point indices (the volume Lambda), kept sorted.
class Volume {
 public:
  Volume() = default;
  explicit Volume(std::vector<Index> points);
  static Volume range(Index lo, Index hi);

  bool contains(Index i) const;
  bool empty() const { return points_.empty(); }
  std::size_t size() const { return points_.size(); }
  const std::vector<Index>& points() const { return points_; }
  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }
  IndexRange hull() const;
  bool is_subset_of(const Volume& other) const;
  std::string describe() const;

  bool operator==(const Volume&) const = default;

 private:
  std::vector<Index> points_;
};

/// Flow value with a tri-state infinite marker.
struct FlowValue {
  enum class State { Finite, PlusInfinite, MinusInfinite, BothInfinite };
  State state = State::Finite;
  Index value = 0;

  bool finite() const { return state == State::Finite; }
  bool operator==(const FlowValue&) const = default;
  std::string str() const;
};

enum class BoundaryKind { Shift, Reflection, Dyadic, FiniteModification };

/// Analytic permutation eta of the whole point set, used outside the core.
class BoundaryCondition {
 public:
  static BoundaryCondition shift(Index n);
  static BoundaryCondition reflection();
  static BoundaryCondition dyadic();
  /// shift(n) except on the listed sources; the overrides must permute the
  /// set {s + n} of their sources' base images.
  static BoundaryCondition finite_modification(Index n,
                                               std::vector<std::pair<Index, Index>> overrides);

  BoundaryKind kind() const { return kind_; }
  Index shift_amount() const { return shift_; }
  const std::map<Index, Index>& overrides() const { return forward_overrides_; }

  Index forward(const PointSet& ps, Index i) const;
  Index inverse(const PointSet& ps, Index i) const;
  FlowValue flow() const;
  bool finite_flow() const { return flow().finite(); }

  /// Bound on |eta(i) - i| in index units for finite-flow kinds.
  Index reach() const;

  /// Whether eta and `other` coincide at every index outside `core`.
  bool agrees_outside(const BoundaryCondition& other, IndexRange core) const;

  std::string describe() const;

 private:
  BoundaryKind kind_ = BoundaryKind::Shift;
  Index shift_ = 0;
  std::map<Index, Index> forward_overrides_;
  std::map<Index, Index> inverse_overrides_;
};

/// A permutation stored explicitly on a finite core window and equal to its
/// boundary condition everywhere else. Swaps keep the image set of the core,
/// so the whole map stays a bijection of the point set.
class WindowPermutation {
 public:
  WindowPermutation(PointSet ps, BoundaryCondition boundary, IndexRange core);

  const PointSet& points() const { return ps_; }
  const BoundaryCondition& boundary() const { return boundary_; }
  IndexRange core() const { return core_; }
  /// Range on which the inverse and coordinates are cached; contains the core
  /// and its image.
  IndexRange span() const { return span_; }

  bool in_core(Index i) const { return core_.contains(i); }
  Index operator()(Index i) const;
  Index inverse(Index i) const;
  double coord(Index i) const;
  double jump_length(Index i) const { return coord((*this)(i)) - coord(i); }

  /// Exchange sigma(x) and sigma(y); both must lie in the core.
  void swap_images(Index x, Index y);

  /// Reassign sigma on `sources` (core points) so that sources[k] maps to
  /// images[k]. The new images must be a rearrangement of the old ones.
  void assign(std::span<const Index> sources, std::span<const Index> images);

  bool operator==(const WindowPermutation& other) const;

 private:
  PointSet ps_;
  BoundaryCondition boundary_;
  IndexRange core_;
  IndexRange span_;
  std::vector<Index> fwd_;
  std::vector<Index> inv_;
  std::vector<double> coords_;
};

/// Smallest index range containing the volume, its image and preimage under
/// eta and, for finite modifications, every overridden jump.
IndexRange window_for(const PointSet& ps, const BoundaryCondition& eta, const Volume& volume);

WindowPermutation swap(const WindowPermutation& sigma, Index x, Index y);

/// sigma ~_Lambda eta: agreement of sigma and sigma^{-1} with eta off Lambda.
bool is_compatible(const WindowPermutation& sigma, const BoundaryCondition& eta,
                   const Volume& volume);

struct FlowRecord {
  Index plus = 0;   // finite part of F_a^+
  Index minus = 0;  // finite part of F_a^-
  FlowValue flow;
};

/// Flow through the dual point between indices j and j + 1.
FlowRecord flow_at(const WindowPermutation& sigma, Index j);

/// F_a^{l,+} - F_a^{l,-}: only jumps of Euclidean length <= l are counted.
Index truncated_flow(const WindowPermutation& sigma, Index j, double l);

/// Every jump (source, image) over the dual point between j and j + 1.
/// Requires a finite-flow boundary.
std::vector<std::pair<Index, Index>> jumps_over(const WindowPermutation& sigma, Index j);

enum class OrbitKind { Finite, EscapesRight, EscapesLeft, Returning, BoundaryPeriodic };

std::string to_string(OrbitKind kind);

struct Orbit {
  OrbitKind kind = OrbitKind::Finite;
  /// Visited indices in forward order. Strands start and end at the first
  /// point outside the core from which the boundary drift is monotone.
  std::vector<Index> path;
};

struct CycleCensus {
  std::map<std::size_t, std::size_t> finite_lengths;
  std::size_t strands_right = 0;  // -inf -> +inf
  std::size_t strands_left = 0;   // +inf -> -inf
  std::vector<Orbit> orbits;
  std::vector<std::size_t> orbit_of;  // per core offset
};

CycleCensus cycle_census(const WindowPermutation& sigma);

/// Orbits of the census having jumps over both dual points (j_a, j_a + 1) and
/// (j_b, j_b + 1).
std::size_t strands_crossing_both(const CycleCensus& census, Index ja, Index jb);

bool is_cut(const WindowPermutation& sigma, Index j);
bool is_pre_cut(const WindowPermutation& sigma, Index j, Index k);

/// tau_n on the core, with shift(n) boundary.
WindowPermutation ground_state(const PointSet& ps, Index n, IndexRange core);

}  // namespace permugibbs
