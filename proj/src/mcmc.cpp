#include <omp.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "permugibbs/parallel.hpp"
#include "permugibbs/rng.hpp"
#include "permugibbs/sampler.hpp"

namespace permugibbs {

void ChainConfig::validate() const {
  if (burn_in < 0) throw std::invalid_argument("burn_in must be >= 0");
  if (steps <= burn_in) throw std::invalid_argument("steps must exceed burn_in");
  if (thinning < 1) throw std::invalid_argument("thinning must be >= 1");
  if (chains < 1) throw std::invalid_argument("chains must be >= 1");
  if (batches < 1) throw std::invalid_argument("batches must be >= 1");
  if (samples_per_chain() < batches) throw std::invalid_argument("fewer samples than batches");
}

std::int64_t ChainConfig::samples_per_chain() const {
  return (steps - burn_in + thinning - 1) / thinning;
}

Observable state_observable(std::vector<Index> points, std::string name) {
  return {std::move(name), [pts = std::move(points)](const WindowPermutation& s) {
            ObsKey k;
            k.reserve(pts.size());
            for (Index x : pts) k.push_back(s(x));
            return k;
          }};
}

Observable window_observable(std::vector<Index> window, std::string name) {
  return {std::move(name), [pts = std::move(window)](const WindowPermutation& s) {
            ObsKey k;
            k.reserve(2 * pts.size());
            for (Index x : pts) {
              k.push_back(s(x));
              k.push_back(s.inverse(x));
            }
            return k;
          }};
}

// ---------------------------------------------------------------------------

EmpiricalDistribution::EmpiricalDistribution(std::vector<std::string> names, int batches)
    : names_(std::move(names)),
      batches_(batches),
      batch_sizes_(static_cast<std::size_t>(batches), 0),
      counts_(names_.size()) {
  if (batches < 1) throw std::invalid_argument("batches must be >= 1");
}

void EmpiricalDistribution::record(const std::vector<ObsKey>& keys, int batch) {
  if (keys.size() != names_.size()) throw std::invalid_argument("one key per observable");
  if (batch < 0 || batch >= batches_) throw std::out_of_range("batch");
  ++batch_sizes_[static_cast<std::size_t>(batch)];
  for (std::size_t i = 0; i < keys.size(); ++i) {
    auto& c = counts_[i][keys[i]];
    if (c.empty()) c.assign(static_cast<std::size_t>(batches_), 0);
    ++c[static_cast<std::size_t>(batch)];
  }
}

void EmpiricalDistribution::merge(const EmpiricalDistribution& other) {
  if (names_.empty() && batch_sizes_.empty()) {
    *this = other;
    return;
  }
  if (other.names_ != names_ || other.batches_ != batches_) {
    throw std::invalid_argument("merging incompatible distributions");
  }
  for (std::size_t b = 0; b < batch_sizes_.size(); ++b) batch_sizes_[b] += other.batch_sizes_[b];
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    for (const auto& [key, c] : other.counts_[i]) {
      auto& mine = counts_[i][key];
      if (mine.empty()) mine.assign(c.size(), 0);
      for (std::size_t b = 0; b < c.size(); ++b) mine[b] += c[b];
    }
  }
}

std::size_t EmpiricalDistribution::index_of(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw std::out_of_range("unknown observable " + name);
  return static_cast<std::size_t>(it - names_.begin());
}

std::int64_t EmpiricalDistribution::samples() const {
  std::int64_t n = 0;
  for (auto b : batch_sizes_) n += b;
  return n;
}

std::int64_t EmpiricalDistribution::count(std::size_t obs, const ObsKey& key) const {
  auto it = counts_[obs].find(key);
  if (it == counts_[obs].end()) return 0;
  std::int64_t n = 0;
  for (auto c : it->second) n += c;
  return n;
}

double EmpiricalDistribution::frequency(std::size_t obs, const ObsKey& key) const {
  const auto n = samples();
  return n == 0 ? 0.0 : static_cast<double>(count(obs, key)) / static_cast<double>(n);
}

double EmpiricalDistribution::standard_error(std::size_t obs, const ObsKey& key) const {
  auto it = counts_[obs].find(key);
  std::vector<double> f;
  for (int b = 0; b < batches_; ++b) {
    const auto size = batch_sizes_[static_cast<std::size_t>(b)];
    if (size == 0) continue;
    const double c = it == counts_[obs].end() ? 0.0 : static_cast<double>(it->second[static_cast<std::size_t>(b)]);
    f.push_back(c / static_cast<double>(size));
  }
  if (f.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : f) mean += x;
  mean /= static_cast<double>(f.size());
  double ss = 0.0;
  for (double x : f) ss += (x - mean) * (x - mean);
  const double k = static_cast<double>(f.size());
  return std::sqrt(ss / (k - 1.0) / k);
}

std::map<ObsKey, double> EmpiricalDistribution::frequencies(std::size_t obs) const {
  std::map<ObsKey, double> out;
  for (const auto& [key, c] : counts_[obs]) out[key] = frequency(obs, key);
  return out;
}

// ---------------------------------------------------------------------------

SwapChain::SwapChain(const PointSet& ps, const BoundaryCondition& eta, const Volume& volume,
                     const Potential& v, std::uint64_t seed)
    : v_(v), sigma_(ps, eta, window_for(ps, eta, volume)), rng_(seed) {
  domain_ = specification_domain(ps, eta, volume).domain;
  if (domain_.size() < 2) throw std::invalid_argument("swap chain needs |D| >= 2");
}

bool SwapChain::step() {
  const auto m = static_cast<std::uint64_t>(domain_.size());
  // modulo bias is below m / 2^64
  const auto a = rng_() % m;
  auto b = rng_() % (m - 1);
  if (b >= a) ++b;
  const Index x = domain_[a];
  const Index y = domain_[b];
  ++proposed_;
  const double delta = swap_delta(sigma_, x, y, v_);
  bool accept = delta >= 0.0;
  if (!accept) {
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    accept = u < std::exp(delta);
  }
  if (accept) {
    sigma_.swap_images(x, y);
    ++accepted_;
  }
  return accept;
}

void mcmc_visit(const PointSet& ps, const BoundaryCondition& eta, const Volume& volume,
                const Potential& v, const ChainConfig& cfg, int chain, const SampleVisitor& visit) {
  cfg.validate();
  SwapChain c(ps, eta, volume, v, chain_seed(cfg.seed, static_cast<std::uint64_t>(chain)));
  std::int64_t sample = 0;
  for (std::int64_t t = 0; t < cfg.steps; ++t) {
    c.step();
    if (t >= cfg.burn_in && (t - cfg.burn_in) % cfg.thinning == 0) visit(c.state(), sample++);
  }
}

namespace {

EmpiricalDistribution run_chain(const PointSet& ps, const BoundaryCondition& eta,
                                const Volume& volume, const Potential& v, const ChainConfig& cfg,
                                const std::vector<Observable>& observables, int chain) {
  std::vector<std::string> names;
  for (const auto& o : observables) names.push_back(o.name);
  EmpiricalDistribution dist(names, cfg.batches);
  const auto total = cfg.samples_per_chain();
  std::vector<ObsKey> keys(observables.size());
  mcmc_visit(ps, eta, volume, v, cfg, chain, [&](const WindowPermutation& s, std::int64_t k) {
    for (std::size_t i = 0; i < observables.size(); ++i) keys[i] = observables[i].key(s);
    dist.record(keys, static_cast<int>(k * cfg.batches / total));
  });
  return dist;
}

EmpiricalDistribution merge_all(const std::vector<EmpiricalDistribution>& parts) {
  EmpiricalDistribution out;
  for (const auto& p : parts) out.merge(p);
  return out;
}

}  // namespace

EmpiricalDistribution mcmc_run(const PointSet& ps, const BoundaryCondition& eta,
                               const Volume& volume, const Potential& v, const ChainConfig& cfg,
                               const std::vector<Observable>& observables) {
  cfg.validate();
  std::vector<EmpiricalDistribution> parts(static_cast<std::size_t>(cfg.chains));
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic) num_threads(thread_budget())
  for (int c = 0; c < cfg.chains; ++c) {
    try {
      parts[static_cast<std::size_t>(c)] = run_chain(ps, eta, volume, v, cfg, observables, c);
    } catch (...) {
#pragma omp critical
      err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return merge_all(parts);
}

EmpiricalDistribution mcmc_run_serial(const PointSet& ps, const BoundaryCondition& eta,
                                      const Volume& volume, const Potential& v,
                                      const ChainConfig& cfg,
                                      const std::vector<Observable>& observables) {
  cfg.validate();
  std::vector<EmpiricalDistribution> parts;
  for (int c = 0; c < cfg.chains; ++c) {
    parts.push_back(run_chain(ps, eta, volume, v, cfg, observables, c));
  }
  return merge_all(parts);
}

std::vector<WindowPermutation> mcmc_samples(const PointSet& ps, const BoundaryCondition& eta,
                                            const Volume& volume, const Potential& v,
                                            const ChainConfig& cfg) {
  std::vector<WindowPermutation> out;
  for (int c = 0; c < cfg.chains; ++c) {
    mcmc_visit(ps, eta, volume, v, cfg, c,
               [&](const WindowPermutation& s, std::int64_t) { out.push_back(s); });
  }
  return out;
}

double tv_distance(const Distribution& p, const Distribution& q) {
  double acc = 0.0;
  auto a = p.begin();
  auto b = q.begin();
  while (a != p.end() || b != q.end()) {
    if (b == q.end() || (a != p.end() && a->first < b->first)) {
      acc += std::abs(a->second);
      ++a;
    } else if (a == p.end() || b->first < a->first) {
      acc += std::abs(b->second);
      ++b;
    } else {
      acc += std::abs(a->second - b->second);
      ++a;
      ++b;
    }
  }
  return 0.5 * acc;
}

Distribution table_distribution(const SpecificationTable& table, const Observable& observable) {
  Distribution out;
  for (std::size_t s = 0; s < table.size(); ++s) {
    out[observable.key(table.materialize(s))] += table.probability(s);
  }
  return out;
}

}  // namespace permugibbs
