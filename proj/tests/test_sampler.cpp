#include <doctest.h>

#include <cmath>
#include <set>

#include "permugibbs/parallel.hpp"
#include "permugibbs/sampler.hpp"

using namespace permugibbs;

namespace {
const PointSet Z = PointSet::integer_lattice();
const Potential X2 = Potential::power(1.0, 2.0);

double factorial(std::size_t n) {
  double f = 1.0;
  for (std::size_t k = 2; k <= n; ++k) f *= static_cast<double>(k);
  return f;
}

bool same_table(const SpecificationTable& a, const SpecificationTable& b) {
  if (a.size() != b.size() || a.log_partition() != b.log_partition()) return false;
  for (std::size_t s = 0; s < a.size(); ++s) {
    if (a.energy(s) != b.energy(s) || a.probability(s) != b.probability(s)) return false;
    const auto x = a.assignment(s);
    const auto y = b.assignment(s);
    if (!std::equal(x.begin(), x.end(), y.begin(), y.end())) return false;
  }
  return true;
}
}  // namespace

TEST_SUITE("sampler") {
  TEST_CASE("specification domain") {
    const auto d = specification_domain(Z, BoundaryCondition::shift(1), Volume::range(0, 4));
    CHECK(d.domain == std::vector<Index>{0, 1, 2, 3});
    CHECK(d.image == std::vector<Index>{1, 2, 3, 4});
    const auto dy = specification_domain(Z, BoundaryCondition::dyadic(), Volume::range(-4, 4));
    CHECK(dy.domain.size() == 6);
    CHECK(dy.domain.size() == dy.image.size());
  }

  TEST_CASE("dyadic domain sizes") {
    const std::size_t expect[] = {6, 13, 28};
    for (Index j = 2; j <= 4; ++j) {
      const Index h = Index{1} << j;
      const auto d = specification_domain(Z, BoundaryCondition::dyadic(), Volume::range(-h, h));
      CHECK(d.domain.size() == expect[j - 2]);
    }
  }

  TEST_CASE("two-state table") {
    const auto t = enumerate_compatible(Z, BoundaryCondition::shift(0), Volume({0, 1}), X2);
    REQUIRE(t.size() == 2);
    CHECK(t.energy(0) == 0.0);
    CHECK(t.energy(1) == 2.0);
    CHECK(t.probability(0) == doctest::Approx(0.8807970779778823).epsilon(1e-14));
    CHECK(t.probability(0) + t.probability(1) == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("three-point partition function") {
    const auto t = enumerate_compatible(Z, BoundaryCondition::shift(0), Volume::range(0, 2), X2);
    CHECK(t.size() == 6);
    const double z = 1.0 + 2.0 * std::exp(-2.0) + 2.0 * std::exp(-6.0) + std::exp(-8.0);
    CHECK(t.partition() == doctest::Approx(z).epsilon(1e-14));
    CHECK(t.log_partition() == doctest::Approx(std::log(z)).epsilon(1e-14));
  }

  TEST_CASE("table is in lexicographic order and complete") {
    const auto t = enumerate_compatible(Z, BoundaryCondition::shift(1), Volume::range(0, 5), X2);
    CHECK(t.size() == static_cast<std::size_t>(factorial(5)));
    for (std::size_t s = 0; s + 1 < t.size(); ++s) {
      const auto a = t.assignment(s);
      const auto b = t.assignment(s + 1);
      CHECK(std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end()));
    }
    for (std::size_t s = 0; s < t.size(); s += 7) {
      CHECK(t.find(t.assignment(s)) == s);
      const auto sigma = t.materialize(s);
      CHECK(is_compatible(sigma, BoundaryCondition::shift(1), t.volume()));
      CHECK(hamiltonian(sigma, t.volume(), X2) == doctest::Approx(t.energy(s)));
      for (Index x : t.domain()) {
        CHECK(sigma(x) == t.image_of(s, x));
        CHECK(t.preimage_of(s, t.image_of(s, x)) == x);
      }
      CHECK(t.flow(s).value == 1);
    }
    const std::vector<std::uint8_t> bogus{0, 0, 1, 2, 3};
    CHECK(t.find(bogus) == t.size());
  }

  TEST_CASE("probabilities sum to one") {
    for (Index n = -2; n <= 2; ++n) {
      const auto t = enumerate_compatible(PointSet::poisson(1.0, 9), BoundaryCondition::shift(n),
                                          Volume::range(-3, 3), Potential::power(0.5, 1.5));
      double sum = 0.0;
      for (std::size_t s = 0; s < t.size(); ++s) sum += t.probability(s);
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("partition function depends only on D and I") {
    // Both boundaries carry the same D and I on this volume; energies only see D -> I.
    const Volume vol = Volume::range(-4, 4);
    const auto a = enumerate_compatible(Z, BoundaryCondition::shift(1), vol, X2);
    const auto b = enumerate_compatible(
        Z, BoundaryCondition::finite_modification(1, {{-9, -4}, {-5, -8}}), vol, X2);
    REQUIRE(a.domain() == b.domain());
    REQUIRE(a.image() == b.image());
    CHECK(a.log_partition() == doctest::Approx(b.log_partition()).epsilon(1e-14));
  }

  TEST_CASE("parallel enumeration matches the serial reference bit for bit") {
    const Volume vol = Volume::range(-3, 3);
    for (const auto& eta : {BoundaryCondition::shift(0), BoundaryCondition::shift(2),
                            BoundaryCondition::reflection()}) {
      const auto p = enumerate_compatible(Z, eta, vol, X2);
      const auto s = enumerate_compatible_serial(Z, eta, vol, X2);
      CHECK(same_table(p, s));
    }
    const auto ps = PointSet::poisson(1.3, 77);
    CHECK(same_table(enumerate_compatible(ps, BoundaryCondition::shift(-1), Volume::range(0, 7),
                                          Potential::power(2.0, 1.5)),
                     enumerate_compatible_serial(ps, BoundaryCondition::shift(-1),
                                                 Volume::range(0, 7), Potential::power(2.0, 1.5))));
  }

  TEST_CASE("enumeration cap") {
    const Volume vol = Volume::range(0, 9);
    CHECK_THROWS_AS(enumerate_compatible(Z, BoundaryCondition::shift(0), vol, X2),
                    std::length_error);
    EnumerationOptions big;
    big.cap = 12;
    CHECK_THROWS_AS(enumerate_compatible(Z, BoundaryCondition::shift(0), Volume({0, 1}), X2, big),
                    std::length_error);
    try {
      enumerate_compatible(Z, BoundaryCondition::shift(0), vol, X2);
    } catch (const std::length_error& e) {
      CHECK(std::string(e.what()).find("10") != std::string::npos);
    }
  }

  TEST_CASE("exact probabilities of events") {
    const auto t = enumerate_compatible(Z, BoundaryCondition::shift(0), Volume::range(0, 2), X2);
    CHECK(exact_probability(t, [](const StateView&) { return true; }) ==
          doctest::Approx(1.0).epsilon(1e-15));
    const double p_fixed = exact_probability(t, [](const StateView& s) { return s.sigma(1) == 1; });
    const double z = 1.0 + 2.0 * std::exp(-2.0) + 2.0 * std::exp(-6.0) + std::exp(-8.0);
    CHECK(p_fixed == doctest::Approx((1.0 + std::exp(-8.0)) / z).epsilon(1e-14));
    const double a = exact_probability(t, [](const StateView& s) { return s.sigma(0) == 2; });
    const double b = exact_probability(t, [](const StateView& s) { return s.sigma_inv(2) == 0; });
    CHECK(a == b);
  }

  TEST_CASE("zero potential gives the uniform law") {
    const auto t = enumerate_compatible(Z, BoundaryCondition::shift(0), Volume::range(0, 4),
                                        Potential::zero());
    for (std::size_t s = 0; s < t.size(); ++s) CHECK(t.probability(s) == doctest::Approx(1.0 / 120));
  }

  TEST_CASE("transition kernel is stochastic and reversible") {
    const auto t = enumerate_compatible(PointSet::poisson(1.0, 2), BoundaryCondition::shift(1),
                                        Volume::range(0, 3), X2);
    for (std::size_t s = 0; s < t.size(); ++s) {
      double row = 0.0;
      for (std::size_t u = 0; u < t.size(); ++u) {
        const double p = transition_probability(t, s, u);
        CHECK(p >= 0.0);
        row += p;
        const double lhs = t.probability(s) * p;
        const double rhs = t.probability(u) * transition_probability(t, u, s);
        CHECK(std::abs(lhs - rhs) <= 1e-12);
      }
      CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("metropolis acceptance") {
    CHECK(metropolis_acceptance(0.0) == 1.0);
    CHECK(metropolis_acceptance(3.0) == 1.0);
    CHECK(metropolis_acceptance(-1.0) == doctest::Approx(std::exp(-1.0)));
  }

  TEST_CASE("chain config validation") {
    ChainConfig c;
    c.steps = 100;
    c.thinning = 10;
    c.batches = 5;
    CHECK_NOTHROW(c.validate());
    CHECK(c.samples_per_chain() == 10);
    c.burn_in = 50;
    CHECK(c.samples_per_chain() == 5);
    ChainConfig bad = c;
    bad.thinning = 0;
    CHECK_THROWS(bad.validate());
    bad = c;
    bad.chains = 0;
    CHECK_THROWS(bad.validate());
    bad = c;
    bad.steps = -1;
    CHECK_THROWS(bad.validate());
  }

  TEST_CASE("swap chain stays compatible") {
    const auto eta = BoundaryCondition::shift(2);
    const Volume vol = Volume::range(-5, 5);
    SwapChain chain(PointSet::poisson(1.0, 4), eta, vol, X2, 99);
    for (int i = 0; i < 2000; ++i) {
      chain.step();
      if (i % 97 == 0) CHECK(is_compatible(chain.state(), eta, vol));
    }
    CHECK(chain.proposed() == 2000);
    CHECK(chain.accepted() > 0);
    CHECK(chain.accepted() < chain.proposed());
  }

  TEST_CASE("chains are deterministic in the seed") {
    ChainConfig cfg;
    cfg.seed = 7;
    cfg.steps = 20000;
    cfg.burn_in = 1000;
    cfg.thinning = 5;
    cfg.chains = 3;
    cfg.batches = 4;
    const Volume vol = Volume::range(0, 4);
    const auto obs = state_observable({0, 1, 2, 3, 4});
    const auto a = mcmc_run(Z, BoundaryCondition::shift(0), vol, X2, cfg, {obs});
    const auto b = mcmc_run(Z, BoundaryCondition::shift(0), vol, X2, cfg, {obs});
    const auto c = mcmc_run_serial(Z, BoundaryCondition::shift(0), vol, X2, cfg, {obs});
    CHECK(a.counts(0) == b.counts(0));
    CHECK(a.counts(0) == c.counts(0));
    CHECK(a.samples() == 3 * cfg.samples_per_chain());
    cfg.seed = 8;
    const auto d = mcmc_run(Z, BoundaryCondition::shift(0), vol, X2, cfg, {obs});
    CHECK(a.counts(0) != d.counts(0));
  }

  TEST_CASE("mcmc_samples agrees with mcmc_run") {
    ChainConfig cfg;
    cfg.seed = 3;
    cfg.steps = 4000;
    cfg.thinning = 40;
    cfg.chains = 2;
    cfg.batches = 2;
    const Volume vol = Volume::range(0, 3);
    const auto obs = state_observable({0, 1, 2, 3});
    const auto samples = mcmc_samples(Z, BoundaryCondition::shift(0), vol, X2, cfg);
    const auto emp = mcmc_run(Z, BoundaryCondition::shift(0), vol, X2, cfg, {obs});
    CHECK(static_cast<std::int64_t>(samples.size()) == emp.samples());
    std::map<ObsKey, std::int64_t> counts;
    for (const auto& s : samples) ++counts[obs.key(s)];
    for (const auto& [k, n] : counts) CHECK(emp.count(0, k) == n);
  }

  TEST_CASE("uniform law is reproduced by the chain") {
    ChainConfig cfg;
    cfg.seed = 11;
    cfg.steps = 200000;
    cfg.burn_in = 1000;
    cfg.thinning = 1;
    cfg.chains = 2;
    const Volume vol = Volume::range(0, 3);
    const auto t = enumerate_compatible(Z, BoundaryCondition::shift(0), vol, Potential::zero());
    const auto obs = state_observable(t.domain());
    const auto emp = mcmc_run(Z, BoundaryCondition::shift(0), vol, Potential::zero(), cfg, {obs});
    CHECK(tv_distance(emp.frequencies(0), table_distribution(t, obs)) < 0.02);
  }

  TEST_CASE("with every move accepted the chain alternates parity") {
    ChainConfig cfg;
    cfg.seed = 11;
    cfg.steps = 2000;
    cfg.thinning = 2;
    const Volume vol = Volume::range(0, 3);
    for (const auto& s : mcmc_samples(Z, BoundaryCondition::shift(0), vol, Potential::zero(), cfg)) {
      int inversions = 0;
      for (Index a = 0; a <= 3; ++a) {
        for (Index b = a + 1; b <= 3; ++b) inversions += s(a) > s(b);
      }
      CHECK(inversions % 2 == 1);
    }
  }

  TEST_CASE("empirical distribution bookkeeping") {
    EmpiricalDistribution e({"a", "b"}, 2);
    e.record({{1}, {5}}, 0);
    e.record({{1}, {6}}, 1);
    e.record({{2}, {6}}, 1);
    CHECK(e.samples() == 3);
    CHECK(e.index_of("b") == 1);
    CHECK(e.count(0, {1}) == 2);
    CHECK(e.frequency(1, {6}) == doctest::Approx(2.0 / 3.0));
    CHECK(e.frequency(1, {9}) == 0.0);
    EmpiricalDistribution f({"a", "b"}, 2);
    f.record({{2}, {5}}, 0);
    e.merge(f);
    CHECK(e.samples() == 4);
    CHECK(e.batch_samples(0) == 2);
    CHECK(e.frequency(0, {2}) == doctest::Approx(0.5));
    CHECK(e.standard_error(0, {2}) >= 0.0);
    EmpiricalDistribution g({"a"}, 2);
    CHECK_THROWS(e.merge(g));
  }

  TEST_CASE("window observable") {
    const auto t1 = ground_state(Z, 1, {-3, 3});
    const auto w = window_observable({0, 2});
    CHECK(w.key(t1) == ObsKey{1, -1, 3, 1});
  }

  TEST_CASE("total variation") {
    const Distribution u{{{0}, 0.5}, {{1}, 0.5}};
    const Distribution p{{{0}, 0.75}, {{1}, 0.25}};
    CHECK(tv_distance(u, p) == doctest::Approx(0.25));
    CHECK(tv_distance(u, u) == 0.0);
    const Distribution q{{{2}, 1.0}};
    CHECK(tv_distance(u, q) == doctest::Approx(1.0));
    CHECK(tv_distance(p, q) == tv_distance(q, p));
  }

  TEST_CASE("thread budget") {
    CHECK(thread_budget() >= 1);
  }
}
