#include "permugibbs/permutation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>
#include <stdexcept>

namespace permugibbs {

// ---------------------------------------------------------------------------
// Volume

Volume::Volume(std::vector<Index> points) : points_(std::move(points)) {
  std::sort(points_.begin(), points_.end());
  points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
}

Volume Volume::range(Index lo, Index hi) {
  std::vector<Index> pts;
  for (Index i = lo; i <= hi; ++i) pts.push_back(i);
  return Volume(std::move(pts));
}

bool Volume::contains(Index i) const {
  return std::binary_search(points_.begin(), points_.end(), i);
}

IndexRange Volume::hull() const {
  if (points_.empty()) return {};
  return {points_.front(), points_.back()};
}

bool Volume::is_subset_of(const Volume& other) const {
  return std::includes(other.points_.begin(), other.points_.end(), points_.begin(), points_.end());
}

std::string Volume::describe() const {
  if (points_.empty()) return "{}";
  const IndexRange h = hull();
  if (static_cast<std::size_t>(h.size()) == points_.size()) {
    return "[" + std::to_string(h.lo) + ";" + std::to_string(h.hi) + "]";
  }
  std::string s = "{";
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (i) s += ";";
    s += std::to_string(points_[i]);
  }
  return s + "}";
}

std::string FlowValue::str() const {
  switch (state) {
    case State::Finite: return std::to_string(value);
    case State::PlusInfinite: return "+inf";
    case State::MinusInfinite: return "-inf";
    case State::BothInfinite: return "inf";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// BoundaryCondition

namespace {

Index dyadic_power(Index x) {
  const auto u = static_cast<std::uint64_t>(x < 0 ? -x : x);
  return static_cast<Index>(u & (~u + 1));
}

Index reflect(const PointSet& ps, Index i) {
  if (ps.is_lattice()) return -i;
  auto j = ps.find(-ps.at(i));
  if (!j) throw std::invalid_argument("reflection boundary needs a point set symmetric about 0");
  return *j;
}

}  // namespace

BoundaryCondition BoundaryCondition::shift(Index n) {
  BoundaryCondition b;
  b.kind_ = BoundaryKind::Shift;
  b.shift_ = n;
  return b;
}

BoundaryCondition BoundaryCondition::reflection() {
  BoundaryCondition b;
  b.kind_ = BoundaryKind::Reflection;
  return b;
}

BoundaryCondition BoundaryCondition::dyadic() {
  BoundaryCondition b;
  b.kind_ = BoundaryKind::Dyadic;
  return b;
}

BoundaryCondition BoundaryCondition::finite_modification(
    Index n, std::vector<std::pair<Index, Index>> overrides) {
  BoundaryCondition b;
  b.kind_ = BoundaryKind::FiniteModification;
  b.shift_ = n;
  std::multiset<Index> base_images;
  std::multiset<Index> new_images;
  for (auto [src, dst] : overrides) {
    if (!b.forward_overrides_.emplace(src, dst).second) {
      throw std::invalid_argument("finite modification lists a source twice");
    }
    if (!b.inverse_overrides_.emplace(dst, src).second) {
      throw std::invalid_argument("finite modification lists an image twice");
    }
    base_images.insert(src + n);
    new_images.insert(dst);
  }
  if (base_images != new_images) {
    throw std::invalid_argument("finite modification is not a bijection: images must permute the base images");
  }
  return b;
}

Index BoundaryCondition::forward(const PointSet& ps, Index i) const {
  switch (kind_) {
    case BoundaryKind::Shift: return i + shift_;
    case BoundaryKind::Reflection: return reflect(ps, i);
    case BoundaryKind::Dyadic: return i == 0 ? 0 : i + 2 * dyadic_power(i);
    case BoundaryKind::FiniteModification: {
      auto it = forward_overrides_.find(i);
      return it != forward_overrides_.end() ? it->second : i + shift_;
    }
  }
  return i;
}

Index BoundaryCondition::inverse(const PointSet& ps, Index i) const {
  switch (kind_) {
    case BoundaryKind::Shift: return i - shift_;
    case BoundaryKind::Reflection: return reflect(ps, i);
    case BoundaryKind::Dyadic: return i == 0 ? 0 : i - 2 * dyadic_power(i);
    case BoundaryKind::FiniteModification: {
      auto it = inverse_overrides_.find(i);
      return it != inverse_overrides_.end() ? it->second : i - shift_;
    }
  }
  return i;
}

FlowValue BoundaryCondition::flow() const {
  switch (kind_) {
    case BoundaryKind::Shift:
    case BoundaryKind::FiniteModification: return {FlowValue::State::Finite, shift_};
    case BoundaryKind::Reflection: return {FlowValue::State::BothInfinite, 0};
    case BoundaryKind::Dyadic: return {FlowValue::State::PlusInfinite, 0};
  }
  return {};
}

Index BoundaryCondition::reach() const {
  if (!finite_flow()) throw std::domain_error("infinite-flow boundary has unbounded reach");
  Index r = std::abs(shift_);
  for (auto [src, dst] : forward_overrides_) r = std::max(r, std::abs(dst - src));
  return r;
}

bool BoundaryCondition::agrees_outside(const BoundaryCondition& other, IndexRange core) const {
  const bool shift_family = kind_ == BoundaryKind::Shift || kind_ == BoundaryKind::FiniteModification;
  const bool other_shift_family =
      other.kind_ == BoundaryKind::Shift || other.kind_ == BoundaryKind::FiniteModification;
  if (shift_family != other_shift_family) return false;
  if (!shift_family) return kind_ == other.kind_;
  if (shift_ != other.shift_) return false;
  auto outside = [&](const std::map<Index, Index>& m, const std::map<Index, Index>& inv) {
    std::map<Index, Index> out;
    for (auto [s, d] : m) {
      if (!core.contains(s)) out.emplace(s, d);
    }
    // Sources inside the core whose images leave it are seen from outside
    // through the inverse.
    for (auto [d, s] : inv) {
      if (!core.contains(d)) out.emplace(s, d);
    }
    return out;
  };
  return outside(forward_overrides_, inverse_overrides_) ==
         outside(other.forward_overrides_, other.inverse_overrides_);
}

std::string BoundaryCondition::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case BoundaryKind::Shift: os << "shift(n=" << shift_ << ")"; break;
    case BoundaryKind::Reflection: os << "reflection"; break;
    case BoundaryKind::Dyadic: os << "dyadic"; break;
    case BoundaryKind::FiniteModification:
      os << "finite-modification(n=" << shift_;
      for (auto [s, d] : forward_overrides_) os << ";" << s << "->" << d;
      os << ")";
      break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// WindowPermutation

WindowPermutation::WindowPermutation(PointSet ps, BoundaryCondition boundary, IndexRange core)
    : ps_(std::move(ps)), boundary_(std::move(boundary)), core_(core) {
  if (core_.size() <= 0) throw std::invalid_argument("empty core window");
  if (boundary_.kind() == BoundaryKind::Dyadic && ps_.kind() != PointSetKind::IntegerLattice) {
    throw std::invalid_argument("dyadic boundary is defined on the integer lattice only");
  }
  if (boundary_.kind() == BoundaryKind::FiniteModification) {
    for (auto [s, d] : boundary_.overrides()) {
      if (!core_.contains(s) || !core_.contains(d)) {
        throw std::invalid_argument("core window must contain every overridden jump");
      }
    }
  }
  fwd_.resize(static_cast<std::size_t>(core_.size()));
  span_ = core_;
  for (Index i = core_.lo; i <= core_.hi; ++i) {
    const Index t = boundary_.forward(ps_, i);
    fwd_[static_cast<std::size_t>(i - core_.lo)] = t;
    span_.lo = std::min(span_.lo, t);
    span_.hi = std::max(span_.hi, t);
  }
  inv_.resize(static_cast<std::size_t>(span_.size()));
  coords_.resize(static_cast<std::size_t>(span_.size()));
  for (Index t = span_.lo; t <= span_.hi; ++t) {
    inv_[static_cast<std::size_t>(t - span_.lo)] = boundary_.inverse(ps_, t);
    coords_[static_cast<std::size_t>(t - span_.lo)] = ps_.at(t);
  }
}

Index WindowPermutation::operator()(Index i) const {
  if (core_.contains(i)) return fwd_[static_cast<std::size_t>(i - core_.lo)];
  return boundary_.forward(ps_, i);
}

Index WindowPermutation::inverse(Index i) const {
  if (span_.contains(i)) return inv_[static_cast<std::size_t>(i - span_.lo)];
  return boundary_.inverse(ps_, i);
}

double WindowPermutation::coord(Index i) const {
  if (span_.contains(i)) return coords_[static_cast<std::size_t>(i - span_.lo)];
  return ps_.at(i);
}

void WindowPermutation::swap_images(Index x, Index y) {
  if (!core_.contains(x) || !core_.contains(y)) {
    throw std::out_of_range("swap point outside the stored core");
  }
  auto& fx = fwd_[static_cast<std::size_t>(x - core_.lo)];
  auto& fy = fwd_[static_cast<std::size_t>(y - core_.lo)];
  std::swap(fx, fy);
  inv_[static_cast<std::size_t>(fx - span_.lo)] = x;
  inv_[static_cast<std::size_t>(fy - span_.lo)] = y;
}

void WindowPermutation::assign(std::span<const Index> sources, std::span<const Index> images) {
  if (sources.size() != images.size()) throw std::invalid_argument("assign: size mismatch");
  std::vector<Index> old_images;
  for (Index s : sources) {
    if (!core_.contains(s)) throw std::out_of_range("assign: source outside the core");
    old_images.push_back((*this)(s));
  }
  std::vector<Index> new_images(images.begin(), images.end());
  std::sort(old_images.begin(), old_images.end());
  std::sort(new_images.begin(), new_images.end());
  if (old_images != new_images) throw std::invalid_argument("assign: images are not a rearrangement");
  for (std::size_t k = 0; k < sources.size(); ++k) {
    fwd_[static_cast<std::size_t>(sources[k] - core_.lo)] = images[k];
    inv_[static_cast<std::size_t>(images[k] - span_.lo)] = sources[k];
  }
}

bool WindowPermutation::operator==(const WindowPermutation& other) const {
  return core_ == other.core_ && fwd_ == other.fwd_ &&
         boundary_.describe() == other.boundary_.describe();
}

IndexRange window_for(const PointSet& ps, const BoundaryCondition& eta, const Volume& volume) {
  if (volume.empty()) throw std::invalid_argument("empty volume");
  IndexRange r = volume.hull();
  for (Index x : volume) {
    for (Index t : {eta.forward(ps, x), eta.inverse(ps, x)}) {
      r.lo = std::min(r.lo, t);
      r.hi = std::max(r.hi, t);
    }
  }
  for (auto [s, d] : eta.overrides()) {
    r.lo = std::min({r.lo, s, d});
    r.hi = std::max({r.hi, s, d});
  }
  return r;
}

WindowPermutation swap(const WindowPermutation& sigma, Index x, Index y) {
  WindowPermutation out = sigma;
  out.swap_images(x, y);
  return out;
}

bool is_compatible(const WindowPermutation& sigma, const BoundaryCondition& eta,
                   const Volume& volume) {
  const PointSet& ps = sigma.points();
  const IndexRange core = sigma.core();
  for (Index x : volume) {
    if (!core.contains(x)) throw std::invalid_argument("volume not contained in the core window");
    if (!core.contains(eta.forward(ps, x)) || !core.contains(eta.inverse(ps, x))) {
      throw std::invalid_argument("core window too small to decide compatibility");
    }
  }
  if (!sigma.boundary().agrees_outside(eta, core)) return false;
  for (Index x = core.lo; x <= core.hi; ++x) {
    if (volume.contains(x)) {
      const Index t = sigma(x);
      if (!core.contains(t) && eta.forward(ps, x) != t) return false;
      continue;
    }
    if (sigma(x) != eta.forward(ps, x) || sigma.inverse(x) != eta.inverse(ps, x)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Flow

namespace {

bool crosses_right(Index src, Index dst, Index j) { return src <= j && dst > j; }
bool crosses_left(Index src, Index dst, Index j) { return src > j && dst <= j; }

// Sources outside the core that may jump over (j, j + 1).
std::vector<Index> outside_sources(const WindowPermutation& sigma, Index j, double l_cap) {
  std::vector<Index> out;
  const IndexRange core = sigma.core();
  if (sigma.boundary().finite_flow()) {
    const Index r = sigma.boundary().reach();
    for (Index i = j - r; i <= j + r + 1; ++i) {
      if (!core.contains(i)) out.push_back(i);
    }
    return out;
  }
  const double a = 0.5 * (sigma.coord(j) + sigma.coord(j + 1));
  for (Index i : sigma.points().indices_in({a - l_cap, a + l_cap})) {
    if (!core.contains(i)) out.push_back(i);
  }
  return out;
}

}  // namespace

FlowRecord flow_at(const WindowPermutation& sigma, Index j) {
  FlowRecord r;
  const IndexRange core = sigma.core();
  auto count = [&](Index i) {
    const Index t = sigma(i);
    if (crosses_right(i, t, j)) ++r.plus;
    if (crosses_left(i, t, j)) ++r.minus;
  };
  for (Index i = core.lo; i <= core.hi; ++i) count(i);
  const BoundaryCondition& b = sigma.boundary();
  if (b.finite_flow()) {
    for (Index i : outside_sources(sigma, j, 0.0)) count(i);
    r.flow = {FlowValue::State::Finite, r.plus - r.minus};
  } else {
    r.flow = b.flow();
  }
  return r;
}

Index truncated_flow(const WindowPermutation& sigma, Index j, double l) {
  if (l < 0.0) throw std::invalid_argument("negative length cap");
  Index net = 0;
  auto count = [&](Index i) {
    const Index t = sigma(i);
    if (std::abs(sigma.coord(t) - sigma.coord(i)) > l) return;
    if (crosses_right(i, t, j)) ++net;
    if (crosses_left(i, t, j)) --net;
  };
  const IndexRange core = sigma.core();
  for (Index i = core.lo; i <= core.hi; ++i) count(i);
  for (Index i : outside_sources(sigma, j, l)) count(i);
  return net;
}

std::vector<std::pair<Index, Index>> jumps_over(const WindowPermutation& sigma, Index j) {
  if (!sigma.boundary().finite_flow()) {
    throw std::domain_error("jumps over a dual point are infinite for this boundary");
  }
  std::vector<std::pair<Index, Index>> out;
  auto visit = [&](Index i) {
    const Index t = sigma(i);
    if (crosses_right(i, t, j) || crosses_left(i, t, j)) out.emplace_back(i, t);
  };
  const IndexRange core = sigma.core();
  for (Index i = core.lo; i <= core.hi; ++i) visit(i);
  for (Index i : outside_sources(sigma, j, 0.0)) visit(i);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Cycles

std::string to_string(OrbitKind kind) {
  switch (kind) {
    case OrbitKind::Finite: return "finite";
    case OrbitKind::EscapesRight: return "escapes-right";
    case OrbitKind::EscapesLeft: return "escapes-left";
    case OrbitKind::Returning: return "returning";
    case OrbitKind::BoundaryPeriodic: return "boundary-periodic";
  }
  return "?";
}

namespace {

// +1 / -1 when the boundary carries a point outside the core monotonically to
// +inf / -inf under forward (backward) iteration; 0 otherwise.
int drift(const WindowPermutation& sigma, Index i, bool forward) {
  const IndexRange core = sigma.core();
  const BoundaryCondition& b = sigma.boundary();
  Index dir = 0;
  switch (b.kind()) {
    case BoundaryKind::Shift:
    case BoundaryKind::FiniteModification: dir = (b.shift_amount() > 0) - (b.shift_amount() < 0); break;
    case BoundaryKind::Dyadic: dir = 1; break;
    case BoundaryKind::Reflection: dir = 0; break;
  }
  if (!forward) dir = -dir;
  if (dir > 0 && i > core.hi) return 1;
  if (dir < 0 && i < core.lo) return -1;
  return 0;
}

}  // namespace

CycleCensus cycle_census(const WindowPermutation& sigma) {
  const IndexRange core = sigma.core();
  const auto n = static_cast<std::size_t>(core.size());
  const std::size_t cap = 10 * n + 10;
  constexpr std::size_t unvisited = static_cast<std::size_t>(-1);

  CycleCensus census;
  census.orbit_of.assign(n, unvisited);

  auto trace = [&](Index start, bool forward, std::vector<Index>& path, bool& closed,
                   bool& left_core) -> int {
    Index cur = start;
    for (std::size_t steps = 0;; ++steps) {
      if (steps > cap) throw std::logic_error("orbit tracing exceeded its step cap");
      const Index nxt = forward ? sigma(cur) : sigma.inverse(cur);
      if (nxt == start) {
        closed = true;
        return 0;
      }
      path.push_back(nxt);
      if (!core.contains(nxt)) {
        left_core = true;
        if (int d = drift(sigma, nxt, forward); d != 0) return d;
      }
      cur = nxt;
    }
  };

  for (Index c = core.lo; c <= core.hi; ++c) {
    if (census.orbit_of[static_cast<std::size_t>(c - core.lo)] != unvisited) continue;
    Orbit orbit;
    std::vector<Index> fwd;
    std::vector<Index> bwd;
    bool closed = false;
    bool left_core = false;
    const int fwd_end = trace(c, true, fwd, closed, left_core);
    int bwd_end = 0;
    if (!closed) {
      bool dummy = false;
      bwd_end = trace(c, false, bwd, dummy, left_core);
    }
    orbit.path.assign(bwd.rbegin(), bwd.rend());
    orbit.path.push_back(c);
    orbit.path.insert(orbit.path.end(), fwd.begin(), fwd.end());

    if (closed) {
      orbit.kind = left_core ? OrbitKind::BoundaryPeriodic : OrbitKind::Finite;
      if (!left_core) ++census.finite_lengths[orbit.path.size()];
    } else if (bwd_end < 0 && fwd_end > 0) {
      orbit.kind = OrbitKind::EscapesRight;
      ++census.strands_right;
    } else if (bwd_end > 0 && fwd_end < 0) {
      orbit.kind = OrbitKind::EscapesLeft;
      ++census.strands_left;
    } else {
      orbit.kind = OrbitKind::Returning;
    }

    const std::size_t id = census.orbits.size();
    for (Index p : orbit.path) {
      if (core.contains(p)) census.orbit_of[static_cast<std::size_t>(p - core.lo)] = id;
    }
    census.orbits.push_back(std::move(orbit));
  }
  return census;
}

std::size_t strands_crossing_both(const CycleCensus& census, Index ja, Index jb) {
  std::size_t count = 0;
  for (const Orbit& o : census.orbits) {
    bool over_a = false;
    bool over_b = false;
    auto check = [&](Index s, Index d) {
      over_a = over_a || crosses_right(s, d, ja) || crosses_left(s, d, ja);
      over_b = over_b || crosses_right(s, d, jb) || crosses_left(s, d, jb);
    };
    for (std::size_t i = 0; i + 1 < o.path.size(); ++i) check(o.path[i], o.path[i + 1]);
    if (o.kind == OrbitKind::Finite || o.kind == OrbitKind::BoundaryPeriodic) {
      check(o.path.back(), o.path.front());
    }
    if (over_a && over_b) ++count;
  }
  return count;
}

// ---------------------------------------------------------------------------
// Cuts

namespace {

Index finite_flow_or_throw(const FlowRecord& r) {
  if (!r.flow.finite()) throw std::domain_error("cuts are defined for finite flow only");
  return r.flow.value;
}

}  // namespace

bool is_cut(const WindowPermutation& sigma, Index j) {
  const FlowRecord r = flow_at(sigma, j);
  const Index n = finite_flow_or_throw(r);
  if (n >= 0) {
    if (r.plus != n || r.minus != 0) return false;
    for (Index t = 0; t < n; ++t) {
      if (sigma(j - n + 1 + t) != j + 1 + t) return false;
    }
    return true;
  }
  const Index m = -n;
  if (r.minus != m || r.plus != 0) return false;
  for (Index t = 0; t < m; ++t) {
    if (sigma(j + 1 + t) != j - m + 1 + t) return false;
  }
  return true;
}

bool is_pre_cut(const WindowPermutation& sigma, Index j, Index k) {
  const Index n = finite_flow_or_throw(flow_at(sigma, j));
  const IndexRange allowed{j - k + 1, j + k};
  auto inside = [&](Index s, Index d) { return allowed.contains(s) && allowed.contains(d); };
  for (auto [s, d] : jumps_over(sigma, j)) {
    if (!inside(s, d)) return false;
  }
  const Index m = n < 0 ? -n : n;
  // Sources on the side the flow leaves from, targets on the side it enters.
  const Index from_lo = n >= 0 ? j - m + 1 : j + 1;
  const Index to_lo = n >= 0 ? j + 1 : j - m + 1;
  for (Index t = 0; t < m; ++t) {
    const Index s = from_lo + t;
    if (!inside(s, sigma(s))) return false;
    const Index d = to_lo + t;
    if (!inside(sigma.inverse(d), d)) return false;
  }
  return true;
}

WindowPermutation ground_state(const PointSet& ps, Index n, IndexRange core) {
  return WindowPermutation(ps, BoundaryCondition::shift(n), core);
}

}  // namespace permugibbs
