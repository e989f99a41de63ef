#include <doctest.h>

#include <cmath>
#include <random>

#include "permugibbs/energy.hpp"

using namespace permugibbs;

namespace {
const PointSet Z = PointSet::integer_lattice();
const Potential X2 = Potential::power(1.0, 2.0);
}  // namespace

TEST_SUITE("energy") {
  TEST_CASE("potential values") {
    CHECK(X2(3.0) == 9.0);
    CHECK(X2(-3.0) == 9.0);
    CHECK(Potential::power(2.0, 1.5)(4.0) == doctest::Approx(16.0));
    CHECK(Potential::zero()(5.0) == 0.0);
    CHECK_THROWS(Potential::power(0.0, 2.0));
    CHECK_THROWS(Potential::power(1.0, 1.0));
  }

  TEST_CASE("hamiltonian") {
    CHECK(hamiltonian(ground_state(Z, 1, {-1, 5}), Volume::range(0, 4), X2) == 4.0);
    CHECK(hamiltonian(ground_state(Z, 0, {0, 4}), Volume::range(0, 4), X2) == 0.0);
    const auto s = swap(ground_state(Z, 0, {-2, 5}), 0, 3);
    CHECK(hamiltonian(s, Volume::range(0, 4), X2) == 18.0);
  }

  TEST_CASE("swap delta") {
    CHECK(swap_delta(ground_state(Z, 0, {-2, 5}), 0, 3, X2) == -18.0);
    CHECK(swap_delta(0.0, 10.0, 1.0, 2.0, X2) == 16.0);
  }

  TEST_CASE("swap delta equals the energy difference") {
    std::mt19937_64 rng(5);
    const auto ps = PointSet::poisson(1.0, 11);
    const Potential v = Potential::power(0.7, 1.6);
    const Volume vol = Volume::range(-6, 6);
    for (int trial = 0; trial < 200; ++trial) {
      auto s = ground_state(ps, static_cast<Index>(rng() % 3), window_for(ps, BoundaryCondition::shift(2), vol));
      // shuffle inside the volume only, keeping compatibility
      std::vector<Index> pts = vol.points();
      for (int k = 0; k < 6; ++k) {
        const Index a = pts[rng() % pts.size()];
        const Index b = pts[rng() % pts.size()];
        if (vol.contains(s(a)) && vol.contains(s(b))) s.swap_images(a, b);
      }
      const Index a = pts[rng() % pts.size()];
      const Index b = pts[rng() % pts.size()];
      if (!vol.contains(s(a)) || !vol.contains(s(b))) continue;
      const double lhs = swap_delta(s, a, b, v);
      const double rhs = hamiltonian(s, vol, v) - hamiltonian(swap(s, a, b), vol, v);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9).scale(1.0));
    }
  }

  TEST_CASE("uncrossing two jumps lowers the energy") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    for (const Potential& v : {X2, Potential::power(2.0, 1.5), Potential::power(0.3, 3.0)}) {
      for (int trial = 0; trial < 2000; ++trial) {
        double x = u(rng), y = u(rng), sx = u(rng), sy = u(rng);
        if (x == y || sx == sy) continue;
        if (x > y) std::swap(x, y);
        if (sx < sy) std::swap(sx, sy);
        // x < y with sx > sy: a crossing pair
        CHECK(swap_delta(x, sx, y, sy, v) > 0.0);
      }
    }
  }

  TEST_CASE("psi values") {
    CHECK(psi(X2, 0.0, std::exp(1.0)) == doctest::Approx(1.3591409142295225).epsilon(1e-12));
    CHECK(psi(X2, 0.0, std::exp(2.0)) == doctest::Approx(1.8472640247326626).epsilon(1e-12));
    CHECK_THROWS(psi(X2, 0.0, 1.0));
  }

  TEST_CASE("psi grows without bound") {
    for (const Potential& v : {X2, Potential::power(1.0, 1.5)}) {
      double prev = psi(v, 0.0, 1e3);
      for (double x = 2e3; x < 1e8; x *= 2.0) {
        const double cur = psi(v, 0.0, x);
        CHECK(cur > prev);
        prev = cur;
      }
      CHECK(prev > 100.0);
    }
  }

  TEST_CASE("c_psi") {
    CHECK(c_psi(X2, 0.0, 2.0).value == doctest::Approx(8.6131694564414).epsilon(1e-9));
    CHECK(c_psi(X2, 0.0, 3.0).value == doctest::Approx(16.99888735229605).epsilon(1e-9));
    CHECK(c_psi(X2, 0.0, 4.0).value == doctest::Approx(26.09348547661191).epsilon(1e-9));
    const auto fl = c_psi(Potential::power(10.0, 2.0), 0.0, 3.0);
    CHECK(fl.floored);
    CHECK(fl.value == kPsiFloor);
  }

  TEST_CASE("psi stays above the level past c_psi") {
    for (double d : {0.0, 1.0, 4.0}) {
      for (double n : {2.0, 5.0, 9.0}) {
        const auto t = c_psi(X2, d, n);
        CHECK(t.bracket_hi - t.bracket_lo <= t.tolerance * std::max(1.0, t.bracket_hi));
        for (double x = t.value * 1.01 + 1e-3; x < t.value * 50.0; x *= 1.3) {
          CHECK(psi(X2, d, x) >= n);
        }
      }
    }
  }

  TEST_CASE("swap lower bound") {
    const SwapGeometry g{0.0, 10.0, 1.0, 2.0, 1.0, 2.0};
    CHECK(swap_lower_bound(X2, g) == doctest::Approx(7.9).epsilon(1e-12));
    CHECK(swap_delta(0.0, 10.0, 1.0, 2.0, X2) >= swap_lower_bound(X2, g));
  }

  TEST_CASE("swap lower bound holds on random geometries") {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<int> d(0, 30);
    for (const Potential& v : {X2, Potential::power(2.0, 1.5)}) {
      for (int trial = 0; trial < 5000; ++trial) {
        const double a = -static_cast<double>(d(rng)) * 0.5;
        const double yp = a + 0.5 + d(rng) * 0.25;
        const double zp = yp + d(rng) * 0.25;
        const double w = zp + 0.5 + d(rng) * 0.25;
        const double y = yp + d(rng) * 0.1;
        const double z = zp - d(rng) * 0.1;
        const SwapGeometry g{a, w, y, z, yp, zp};
        CHECK(swap_delta(a, w, y, z, v) >= swap_lower_bound(v, g) - 1e-9);
      }
    }
  }

  TEST_CASE("min energy rearrangement") {
    const auto s = swap(swap(ground_state(Z, 1, {-6, 6}), -2, 3), 0, 1);
    const Volume vol = Volume::range(-4, 4);
    const auto m = min_energy_rearrangement(s, vol);
    CHECK(m == ground_state(Z, 1, {-6, 6}));
    CHECK(min_energy_rearrangement(m, vol) == m);
    CHECK(hamiltonian(m, vol, X2) <= hamiltonian(s, vol, X2));
  }

  TEST_CASE("min energy rearrangement is order preserving and minimal") {
    std::mt19937_64 rng(31);
    const auto ps = PointSet::poisson(1.0, 3);
    const Volume vol = Volume::range(-5, 5);
    for (int trial = 0; trial < 100; ++trial) {
      const Index n = static_cast<Index>(rng() % 5) - 2;
      auto s = ground_state(ps, n, window_for(ps, BoundaryCondition::shift(n), vol));
      const auto& pts = vol.points();
      for (int k = 0; k < 8; ++k) {
        const Index a = pts[rng() % pts.size()];
        const Index b = pts[rng() % pts.size()];
        if (vol.contains(s(a)) && vol.contains(s(b))) s.swap_images(a, b);
      }
      const auto m = min_energy_rearrangement(s, vol);
      CHECK(is_compatible(m, BoundaryCondition::shift(n), vol));
      CHECK(min_energy_rearrangement(m, vol) == m);
      CHECK(hamiltonian(m, vol, X2) <= hamiltonian(s, vol, X2) + 1e-12);
      Index prev_src = 0;
      Index prev_dst = 0;
      bool first = true;
      for (Index x : pts) {
        if (!vol.contains(m(x))) continue;
        if (!first) {
          CHECK(x > prev_src);
          CHECK(m(x) > prev_dst);
        }
        prev_src = x;
        prev_dst = m(x);
        first = false;
      }
    }
  }
}
