#include "permugibbs/pointset.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "permugibbs/rng.hpp"

namespace permugibbs {

std::string to_string(PointSetKind kind) {
  switch (kind) {
    case PointSetKind::IntegerLattice: return "integer-lattice";
    case PointSetKind::ScaledLattice: return "scaled-lattice";
    case PointSetKind::Poisson: return "poisson";
    case PointSetKind::Explicit: return "explicit";
  }
  return "unknown";
}

namespace detail {

class PointGenerator {
 public:
  explicit PointGenerator(PointSetSpec spec) : spec_(std::move(spec)) {}
  virtual ~PointGenerator() = default;

  virtual double at(Index i) const = 0;
  /// Some index whose point is close to a; searches start there.
  virtual Index guess(double a) const = 0;

  const PointSetSpec& spec() const { return spec_; }

 private:
  PointSetSpec spec_;
};

namespace {

Index floor_div(Index a, Index b) {
  Index q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

class LatticeGenerator final : public PointGenerator {
 public:
  explicit LatticeGenerator(PointSetSpec spec)
      : PointGenerator(std::move(spec)), spacing_(this->spec().spacing) {}
  double at(Index i) const override { return static_cast<double>(i) * spacing_; }
  Index guess(double a) const override {
    return static_cast<Index>(std::floor(a / spacing_));
  }

 private:
  double spacing_;
};

class PeriodicGenerator final : public PointGenerator {
 public:
  explicit PeriodicGenerator(PointSetSpec spec) : PointGenerator(std::move(spec)) {
    const auto& p = this->spec().listed;
    gaps_ = static_cast<Index>(p.size()) - 1;
    period_ = p.back() - p.front();
  }
  double at(Index i) const override {
    const auto& p = spec().listed;
    const Index q = floor_div(i, gaps_);
    const Index r = i - q * gaps_;
    return p[static_cast<std::size_t>(r)] + static_cast<double>(q) * period_;
  }
  Index guess(double a) const override {
    const auto& p = spec().listed;
    const double q = std::floor((a - p.front()) / period_);
    return static_cast<Index>(q) * gaps_;
  }

 private:
  Index gaps_ = 1;
  double period_ = 1.0;
};

// Inter-arrival exponentials grown outward from 0; the draw for
// (direction, k) depends only on (seed, direction, k).
class PoissonGenerator final : public PointGenerator {
 public:
  explicit PoissonGenerator(PointSetSpec spec) : PointGenerator(std::move(spec)) {}

  double at(Index i) const override {
    std::lock_guard<std::mutex> lock(mutex_);
    if (i >= 0) {
      extend(right_, 0, static_cast<std::size_t>(i) + 1);
      return right_[static_cast<std::size_t>(i)];
    }
    extend(left_, 1, static_cast<std::size_t>(-i));
    return -left_[static_cast<std::size_t>(-i - 1)];
  }
  Index guess(double a) const override {
    return static_cast<Index>(std::floor(a * spec().rate));
  }

 private:
  void extend(std::vector<double>& cum, std::uint64_t direction, std::size_t n) const {
    while (cum.size() < n) {
      const std::uint64_t k = cum.size();
      const double u = counter_uniform(spec().seed, direction, k);
      const double gap = -std::log1p(-u) / spec().rate;
      cum.push_back((cum.empty() ? 0.0 : cum.back()) + gap);
    }
  }

  mutable std::mutex mutex_;
  mutable std::vector<double> right_;
  mutable std::vector<double> left_;
};

}  // namespace
}  // namespace detail

PointSet::PointSet(std::shared_ptr<const detail::PointGenerator> gen) : gen_(std::move(gen)) {}

PointSet PointSet::integer_lattice() {
  PointSetSpec s;
  s.kind = PointSetKind::IntegerLattice;
  s.spacing = 1.0;
  return PointSet(std::make_shared<detail::LatticeGenerator>(s));
}

PointSet PointSet::scaled_lattice(double spacing) {
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw std::invalid_argument("lattice spacing must be positive");
  }
  PointSetSpec s;
  s.kind = PointSetKind::ScaledLattice;
  s.spacing = spacing;
  return PointSet(std::make_shared<detail::LatticeGenerator>(s));
}

PointSet PointSet::poisson(double rate, std::uint64_t seed) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw std::invalid_argument("poisson rate must be positive");
  }
  PointSetSpec s;
  s.kind = PointSetKind::Poisson;
  s.rate = rate;
  s.seed = seed;
  return PointSet(std::make_shared<detail::PoissonGenerator>(s));
}

PointSet PointSet::periodic(std::vector<double> listed) {
  if (listed.size() < 2) {
    throw std::invalid_argument("explicit point set needs at least two points");
  }
  for (std::size_t i = 1; i < listed.size(); ++i) {
    if (!(listed[i] > listed[i - 1])) {
      throw std::invalid_argument("explicit points must be strictly increasing");
    }
  }
  PointSetSpec s;
  s.kind = PointSetKind::Explicit;
  s.listed = std::move(listed);
  return PointSet(std::make_shared<detail::PeriodicGenerator>(s));
}

PointSet PointSet::from_spec(const PointSetSpec& spec) {
  switch (spec.kind) {
    case PointSetKind::IntegerLattice: return integer_lattice();
    case PointSetKind::ScaledLattice: return scaled_lattice(spec.spacing);
    case PointSetKind::Poisson: return poisson(spec.rate, spec.seed);
    case PointSetKind::Explicit: return periodic(spec.listed);
  }
  throw std::invalid_argument("unknown point set kind");
}

PointSetKind PointSet::kind() const { return gen_->spec().kind; }
const PointSetSpec& PointSet::spec() const { return gen_->spec(); }

bool PointSet::is_lattice() const {
  return kind() == PointSetKind::IntegerLattice || kind() == PointSetKind::ScaledLattice;
}

double PointSet::at(Index i) const { return gen_->at(i); }

Index PointSet::first_above(double a) const {
  // Bracket [lo, hi] with at(lo) <= a < at(hi), then bisect.
  Index lo = gen_->guess(a);
  Index hi = lo;
  Index step = 1;
  if (at(lo) > a) {
    while (at(lo) > a) {
      hi = lo;
      lo -= step;
      step *= 2;
    }
  } else {
    while (at(hi) <= a) {
      lo = hi;
      hi += step;
      step *= 2;
    }
  }
  while (hi - lo > 1) {
    const Index mid = lo + (hi - lo) / 2;
    if (at(mid) > a) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

Index PointSet::last_below(double a) const {
  Index i = first_above(a) - 1;
  while (at(i) >= a) --i;
  return i;
}

std::optional<Index> PointSet::find(double x) const {
  const Index i = first_above(x) - 1;
  const double tol = 1e-12 * std::max(1.0, std::abs(x));
  for (Index j : {i, i + 1}) {
    if (std::abs(at(j) - x) <= tol) return j;
  }
  return std::nullopt;
}

std::vector<Index> PointSet::indices_in(Window w) const {
  std::vector<Index> out;
  if (w.hi < w.lo) return out;
  for (Index i = last_below(w.lo) + 1; at(i) <= w.hi; ++i) out.push_back(i);
  return out;
}

std::vector<double> PointSet::points_in(Window w) const {
  std::vector<double> out;
  for (Index i : indices_in(w)) out.push_back(at(i));
  return out;
}

PointSet generate(const PointSetSpec& spec, Window window) {
  if (!(window.hi > window.lo)) {
    throw std::invalid_argument("empty window");
  }
  PointSet ps = PointSet::from_spec(spec);
  ps.window_ = window;
  ps.materialized_ = ps.points_in(window);
  return ps;
}

Index index_offset(const PointSet& ps, double a, Index k) {
  if (k > 0) return ps.first_above(a) + (k - 1);
  if (k < 0) return ps.last_below(a) + (k + 1);
  auto i = ps.find(a);
  if (!i) throw std::invalid_argument("k = 0 requires a to be a point of the set");
  return *i;
}

double index_from(const PointSet& ps, double a, Index k) { return ps.at(index_offset(ps, a, k)); }

DualPoint dual_at(const PointSet& ps, Index j) {
  DualPoint d;
  d.left = ps.at(j);
  d.right = ps.at(j + 1);
  d.value = 0.5 * (d.left + d.right);
  d.left_index = j;
  return d;
}

std::vector<DualPoint> dual_points(const PointSet& ps, Window window) {
  const auto idx = ps.indices_in(window);
  if (idx.size() < 2) {
    throw std::invalid_argument("window holds fewer than two points");
  }
  std::vector<DualPoint> out;
  out.reserve(idx.size() - 1);
  for (std::size_t i = 0; i + 1 < idx.size(); ++i) out.push_back(dual_at(ps, idx[i]));
  return out;
}

double separation_constant(const PointSet& ps, double a, Index n) {
  const Index m = n < 0 ? -n : n;
  std::vector<double> pts;
  for (Index k = -m - 1; k <= m + 1; ++k) {
    if (k == 0) {
      if (auto i = ps.find(a)) pts.push_back(ps.at(*i));
      continue;
    }
    pts.push_back(index_from(ps, a, k));
  }
  double c = 1.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double gap = pts[i] - pts[i - 1];
    c = std::max({c, gap, 1.0 / gap});
  }
  return c;
}

RegularityConstants growth_constant(const PointSet& ps, double a, double truncation) {
  if (!(truncation > 0.0)) throw std::invalid_argument("truncation must be positive");
  const Window& w = ps.window();
  if (!ps.materialized().empty() && (w.lo > a - truncation || w.hi < a + truncation)) {
    throw std::invalid_argument("window too small for truncation radius");
  }
  // count(t)/t only peaks where count jumps, i.e. at t = |x - a|.
  std::vector<double> dist;
  for (Index i : ps.indices_in({a - truncation, a + truncation})) {
    const double d = std::abs(ps.at(i) - a);
    if (d > 0.0) dist.push_back(d);
  }
  std::sort(dist.begin(), dist.end());
  RegularityConstants rc;
  rc.truncation_radius = truncation;
  rc.exact = ps.is_lattice();
  double best_t = 0.0;
  for (std::size_t i = 0; i < dist.size();) {
    std::size_t j = i;
    while (j < dist.size() && dist[j] == dist[i]) ++j;
    const double ratio = static_cast<double>(j) / dist[i];
    if (ratio > rc.growth) {
      rc.growth = ratio;
      best_t = dist[i];
    }
    i = j;
  }
  rc.separation = 1.0;
  rc.still_growing = !rc.exact && best_t > 0.5 * truncation;
  return rc;
}

}  // namespace permugibbs
