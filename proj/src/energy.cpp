#include "permugibbs/energy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace permugibbs {

Potential Potential::power(double alpha, double p) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be positive");
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("exponent must exceed 1");
  Potential v;
  v.kind_ = Kind::Power;
  v.alpha_ = alpha;
  v.p_ = p;
  return v;
}

Potential Potential::zero() { return Potential{}; }

double Potential::operator()(double x) const {
  if (kind_ == Kind::Zero) return 0.0;
  const double a = std::abs(x);
  if (p_ == 2.0) return alpha_ * a * a;
  return alpha_ * std::pow(a, p_);
}

std::string Potential::describe() const {
  if (kind_ == Kind::Zero) return "zero";
  std::ostringstream os;
  os << "power(alpha=" << alpha_ << ";p=" << p_ << ")";
  return os.str();
}

double hamiltonian(const WindowPermutation& sigma, const Volume& volume, const Potential& v) {
  double h = 0.0;
  for (Index x : volume) {
    if (!sigma.in_core(x)) throw std::invalid_argument("volume not contained in the core window");
    const Index t = sigma(x);
    if (volume.contains(t)) h += v(sigma.coord(t) - sigma.coord(x));
  }
  return h;
}

double swap_delta(const WindowPermutation& sigma, Index x, Index y, const Potential& v) {
  return swap_delta(sigma.coord(x), sigma.coord(sigma(x)), sigma.coord(y), sigma.coord(sigma(y)), v);
}

double psi(const Potential& v, double d, double x) {
  if (!(x > 1.0)) throw std::domain_error("psi needs x > 1");
  return (v(x) + v(0.0) - 2.0 * v(0.5 * (x + d))) / (x * std::log(x));
}

PsiThreshold c_psi(const Potential& v, double d, double level) {
  if (v.kind() != Potential::Kind::Power) {
    throw std::invalid_argument("c_psi needs a power potential");
  }
  if (d < 0.0) throw std::invalid_argument("c_psi needs d >= 0");
  PsiThreshold out;
  out.d = d;
  out.level = level;
  out.tolerance = kPsiTolerance;

  auto below = [&](double x) { return psi(v, d, x) < level; };

  // Walk a fine geometric grid until psi has passed its asymptotic minimum,
  // is increasing and has stayed >= N for a factor 8 beyond the last dip.
  constexpr double ratio = 1.02;
  const double settle = std::max(64.0, std::exp(2.0 / (v.exponent() - 1.0)));
  double last_below = 0.0;
  double x = kPsiFloor;
  double prev = psi(v, d, x);
  if (prev < level) last_below = x;
  for (;;) {
    const double nx = x * ratio;
    const double cur = psi(v, d, nx);
    if (cur < level) last_below = nx;
    x = nx;
    const bool rising = cur > prev;
    prev = cur;
    if (cur >= level && rising && x > settle && x > 8.0 * last_below) break;
    if (!std::isfinite(x)) throw std::runtime_error("c_psi bracket search diverged");
  }

  if (last_below == 0.0) {
    out.value = kPsiFloor;
    out.bracket_lo = out.bracket_hi = kPsiFloor;
    out.floored = true;
    return out;
  }
  double lo = last_below;
  double hi = last_below * ratio;
  while (below(hi)) {  // never expected; guards against a missed sign change
    lo = hi;
    hi *= ratio;
  }
  while (hi - lo > kPsiTolerance * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (below(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  out.value = std::max(hi, kPsiFloor);
  return out;
}

double swap_lower_bound(const Potential& v, const SwapGeometry& g) {
  if (!(g.v < g.y_prime && g.y_prime <= g.z_prime && g.z_prime < g.w && g.y_prime <= g.y &&
        g.z <= g.z_prime)) {
    throw std::invalid_argument("swap bound geometry violated");
  }
  const double m = std::min(g.y_prime - g.v, g.w - g.z_prime);
  if (m == 0.0) return 0.0;
  const double len = g.w - g.v;
  const double d = g.z_prime - g.y_prime;
  // psi_d(len) * log(len) == (V(len) + V(0) - 2 V((len + d) / 2)) / len
  return 2.0 * m * (v(len) + v(0.0) - 2.0 * v(0.5 * (len + d))) / len;
}

WindowPermutation min_energy_rearrangement(const WindowPermutation& sigma, const Volume& volume) {
  std::vector<Index> domain;
  std::vector<Index> image;
  for (Index x : volume) {
    if (!sigma.in_core(x)) throw std::invalid_argument("volume not contained in the core window");
    const Index t = sigma(x);
    if (volume.contains(t)) {
      domain.push_back(x);
      image.push_back(t);
    }
  }
  std::sort(image.begin(), image.end());
  WindowPermutation out = sigma;
  out.assign(domain, image);
  return out;
}

}  // namespace permugibbs
