#include "permugibbs/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "permugibbs/rng.hpp"

namespace permugibbs {

bool CheckReport::passed() const { return violations() == 0; }

std::size_t CheckReport::violations() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const CheckRow& r) { return !r.pass; }));
}

double CheckReport::worst_margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) m = std::min(m, r.margin);
  return m;
}

// ---------------------------------------------------------------------------

void validate_nested(const std::vector<Volume>& volumes, const std::vector<Index>& window) {
  if (volumes.empty()) throw std::invalid_argument("scan needs at least one volume");
  for (std::size_t i = 0; i + 1 < volumes.size(); ++i) {
    if (!volumes[i].is_subset_of(volumes[i + 1]) || volumes[i].size() >= volumes[i + 1].size()) {
      throw std::invalid_argument("scan volumes must increase strictly by inclusion");
    }
  }
  if (window.empty()) throw std::invalid_argument("empty observation window");
  for (Index x : window) {
    if (!volumes.front().contains(x)) {
      throw std::invalid_argument("observation window must lie inside the smallest volume");
    }
  }
}

namespace {

Distribution resample(const EmpiricalDistribution& d, std::size_t obs,
                      const std::vector<int>& picks) {
  std::int64_t total = 0;
  for (int b : picks) total += d.batch_samples(b);
  Distribution out;
  if (total == 0) return out;
  for (const auto& [key, c] : d.counts(obs)) {
    std::int64_t n = 0;
    for (int b : picks) n += c[static_cast<std::size_t>(b)];
    if (n > 0) out[key] = static_cast<double>(n) / static_cast<double>(total);
  }
  return out;
}

std::vector<int> draw_batches(std::mt19937_64& rng, int batches) {
  std::vector<int> picks(static_cast<std::size_t>(batches));
  for (auto& b : picks) b = static_cast<int>(rng() % static_cast<std::uint64_t>(batches));
  return picks;
}

EmpiricalDistribution sample_window(const PointSet& ps, const BoundaryCondition& eta,
                                    const Volume& volume, const std::vector<Index>& window,
                                    const Potential& v, ChainConfig cfg, std::string_view job) {
  cfg.seed = derive_seed(cfg.seed, job);
  return mcmc_run(ps, eta, volume, v, cfg, {window_observable(window)});
}

}  // namespace

double tv_bootstrap_stderr(const EmpiricalDistribution& a, std::size_t obs_a,
                           const EmpiricalDistribution& b, std::size_t obs_b, int replicates,
                           std::uint64_t seed) {
  if (replicates < 2) return 0.0;
  std::mt19937_64 rng(seed);
  std::vector<double> tv;
  tv.reserve(static_cast<std::size_t>(replicates));
  for (int r = 0; r < replicates; ++r) {
    const auto pa = draw_batches(rng, a.batches());
    const auto pb = draw_batches(rng, b.batches());
    tv.push_back(tv_distance(resample(a, obs_a, pa), resample(b, obs_b, pb)));
  }
  double mean = 0.0;
  for (double x : tv) mean += x;
  mean /= static_cast<double>(tv.size());
  double ss = 0.0;
  for (double x : tv) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(tv.size() - 1));
}

ScanResult volume_scan(const PointSet& ps, const BoundaryCondition& eta,
                       const std::vector<Volume>& volumes, const std::vector<Index>& window,
                       const Potential& v, const ScanOptions& opts) {
  validate_nested(volumes, window);
  opts.chain.validate();
  ScanResult out;
  out.volumes = volumes;
  out.window = window;
  std::vector<EmpiricalDistribution> emp;
  for (const auto& vol : volumes) {
    emp.push_back(sample_window(ps, eta, vol, window, v, opts.chain, "scan:" + vol.describe()));
    out.marginals.push_back(emp.back().frequencies(0));
  }
  out.samples_per_volume = emp.front().samples();
  const std::size_t m = volumes.size();
  out.pairwise.assign(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = i + 1; k < m; ++k) {
      out.pairwise[i][k] = out.pairwise[k][i] = tv_distance(out.marginals[i], out.marginals[k]);
    }
  }
  for (std::size_t i = 0; i + 1 < m; ++i) {
    out.tv.push_back(out.pairwise[i][i + 1]);
    out.tv_stderr.push_back(tv_bootstrap_stderr(emp[i], 0, emp[i + 1], 0, opts.bootstrap,
                                                derive_seed(opts.chain.seed, "bootstrap") + i));
  }
  return out;
}

ScanResult coupling_scan(const PointSet& ps, const BoundaryCondition& eta,
                         const BoundaryCondition& eta2, const std::vector<Volume>& volumes,
                         const std::vector<Index>& window, const Potential& v,
                         const ScanOptions& opts) {
  const FlowValue f1 = eta.flow();
  const FlowValue f2 = eta2.flow();
  if (!f1.finite() || !f2.finite()) {
    throw std::invalid_argument("coupling needs finite-flow boundaries");
  }
  if (f1 != f2) {
    throw std::invalid_argument("boundaries carry different flows (" + f1.str() + " vs " +
                                f2.str() + "); their limits are distinct Gibbs measures");
  }
  validate_nested(volumes, window);
  opts.chain.validate();
  ScanResult out;
  out.volumes = volumes;
  out.window = window;
  for (std::size_t i = 0; i < volumes.size(); ++i) {
    const auto& vol = volumes[i];
    const auto a = sample_window(ps, eta, vol, window, v, opts.chain, "couple:a:" + vol.describe());
    const auto b = sample_window(ps, eta2, vol, window, v, opts.chain, "couple:b:" + vol.describe());
    out.marginals.push_back(a.frequencies(0));
    out.other_marginals.push_back(b.frequencies(0));
    out.tv.push_back(tv_distance(out.marginals.back(), out.other_marginals.back()));
    out.tv_stderr.push_back(tv_bootstrap_stderr(a, 0, b, 0, opts.bootstrap,
                                                derive_seed(opts.chain.seed, "bootstrap") + i));
    out.samples_per_volume = a.samples();
  }
  return out;
}

// ---------------------------------------------------------------------------

CutStatistics cut_statistics(const std::vector<WindowPermutation>& samples,
                             const std::vector<Index>& duals, Index n, Index k) {
  CutStatistics st;
  st.n = n;
  st.k = k;
  const Index strands = n < 0 ? -n : n;
  for (const auto& sigma : samples) {
    CutSample cs;
    for (Index j : duals) {
      if (is_cut(sigma, j)) cs.cuts.push_back(j);
      if (is_pre_cut(sigma, j, k)) cs.pre_cuts.push_back(j);
    }
    if (k >= strands) {
      for (Index j : cs.cuts) {
        if (std::find(cs.pre_cuts.begin(), cs.pre_cuts.end(), j) == cs.pre_cuts.end()) ++st.nesting_violations;
      }
    }
    if (cs.cuts.size() >= 2) {
      const CycleCensus census = cycle_census(sigma);
      for (std::size_t a = 0; a < cs.cuts.size(); ++a) {
        for (std::size_t b = a + 1; b < cs.cuts.size(); ++b) {
          const auto c = static_cast<Index>(strands_crossing_both(census, cs.cuts[a], cs.cuts[b]));
          cs.strands.push_back({cs.cuts[a], cs.cuts[b], c});
          ++st.pairs_checked;
          if (c != strands) ++st.strand_violations;
        }
      }
    }
    st.samples.push_back(std::move(cs));
  }
  return st;
}

// ---------------------------------------------------------------------------

KThreshold k_threshold(Index n, double c_n, const Potential& v) {
  if (v.kind() != Potential::Kind::Power) throw std::invalid_argument("k threshold needs a power potential");
  if (n < 0) throw std::invalid_argument("k threshold needs n >= 0");
  if (!(c_n >= static_cast<double>(n + 1))) throw std::invalid_argument("c_n must be >= n + 1");
  KThreshold k;
  k.n = n;
  k.c_n = c_n;
  const double nd = static_cast<double>(n);
  k.terms[0] = nd + 1.0;
  k.terms[1] = c_n * c_psi(v, nd * c_n, 2.0 * c_n).value;
  k.terms[2] = c_n * c_psi(v, 0.0, 2.0 * c_n).value + nd * c_n * c_n;
  k.terms[3] = 24.0 * c_n * c_n * c_n;
  k.terms[4] = 33.0 * nd * c_n * c_n + 1.0;
  const double top = *std::max_element(k.terms.begin(), k.terms.end());
  k.value = static_cast<Index>(std::ceil(top));
  return k;
}

}  // namespace permugibbs
