#pragma once

#include <string>

#include "permugibbs/permutation.hpp"

namespace permugibbs {

/// Symmetric pair potential V of a jump length. Power kinds are strictly
/// convex; the zero potential is kept only for the V = 0 uniformity demo.
class Potential {
 public:
  enum class Kind { Power, Zero };

  static Potential power(double alpha, double p);
  static Potential zero();

  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double exponent() const { return p_; }
  bool degenerate() const { return kind_ == Kind::Zero; }

  double operator()(double x) const;
  std::string describe() const;

 private:
  Kind kind_ = Kind::Zero;
  double alpha_ = 0.0;
  double p_ = 2.0;
};

inline double potential_value(const Potential& v, double x) { return v(x); }

/// H_Lambda(sigma): sum of V(sigma(x) - x) over x in Lambda with sigma(x) in Lambda.
double hamiltonian(const WindowPermutation& sigma, const Volume& volume, const Potential& v);

/// H(sigma) - H(sigma_xy) for any volume holding x, y, sigma(x), sigma(y).
double swap_delta(const WindowPermutation& sigma, Index x, Index y, const Potential& v);

/// Four-term form on raw coordinates, jumps x -> sx and y -> sy.
inline double swap_delta(double x, double sx, double y, double sy, const Potential& v) {
  return v(sx - x) + v(sy - y) - v(sx - y) - v(sy - x);
}

/// psi_d(x) = (V(x) + V(0) - 2 V((x + d) / 2)) / (x log x), natural log, x > 1.
double psi(const Potential& v, double d, double x);

struct PsiThreshold {
  double d = 0.0;
  double level = 0.0;  // N
  double value = 0.0;  // c_psi(d, N)
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double tolerance = 0.0;
  bool floored = false;  // psi_d >= N already holds at the floor
};

inline constexpr double kPsiFloor = 1.0 + 1e-6;
inline constexpr double kPsiTolerance = 1e-9;

/// sup{x : psi_d(x) < N}, floored at 1 + 1e-6.
PsiThreshold c_psi(const Potential& v, double d, double level);

/// Geometry of the swap lower bound: jumps v -> w and y -> z with
/// v < y' <= z' < w, y' <= y and z <= z'.
struct SwapGeometry {
  double v, w, y, z, y_prime, z_prime;
};

/// 2 min{y'-v, w-z'} psi_{z'-y'}(w-v) log(w-v); the psi*log product is
/// evaluated in closed form so w - v <= 1 is admissible.
double swap_lower_bound(const Potential& v, const SwapGeometry& g);

/// The unique sigma' ~_Lambda sigma that maps Lambda cap sigma^{-1}(Lambda)
/// increasingly onto Lambda cap sigma(Lambda).
WindowPermutation min_energy_rearrangement(const WindowPermutation& sigma, const Volume& volume);

}  // namespace permugibbs
