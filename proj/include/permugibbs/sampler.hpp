#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "permugibbs/energy.hpp"
#include "permugibbs/permutation.hpp"

namespace permugibbs {

/// D = Lambda cap eta^{-1}(Lambda) and I = Lambda cap eta(Lambda), sorted.
struct SpecificationDomain {
  Volume volume;
  std::vector<Index> domain;
  std::vector<Index> image;
};

SpecificationDomain specification_domain(const PointSet& ps, const BoundaryCondition& eta,
                                         const Volume& volume);

struct EnumerationOptions {
  std::size_t cap = 9;  // max |D|; 9! = 362880 states
};

inline constexpr std::size_t kHardEnumerationCap = 11;

/// Every sigma ~_Lambda eta, in lexicographic order of the images of D, with
/// energies and normalised probabilities.
class SpecificationTable {
 public:
  const PointSet& points() const { return ps_; }
  const BoundaryCondition& boundary() const { return eta_; }
  const Potential& potential() const { return v_; }
  const Volume& volume() const { return dom_.volume; }
  const std::vector<Index>& domain() const { return dom_.domain; }
  const std::vector<Index>& image() const { return dom_.image; }

  std::size_t size() const { return energy_.size(); }
  double energy(std::size_t s) const { return energy_[s]; }
  double probability(std::size_t s) const { return prob_[s]; }
  double log_partition() const { return log_z_; }
  double partition() const;

  /// Positions into image() assigned to domain()[0], domain()[1], ...
  std::span<const std::uint8_t> assignment(std::size_t s) const;
  Index image_of(std::size_t s, Index x) const;
  Index preimage_of(std::size_t s, Index t) const;
  WindowPermutation materialize(std::size_t s) const;
  FlowValue flow(std::size_t s) const;

  /// State id of the assignment, or size() when absent.
  std::size_t find(std::span<const std::uint8_t> assignment) const;

 private:
  friend SpecificationTable enumerate_compatible(const PointSet&, const BoundaryCondition&,
                                                 const Volume&, const Potential&,
                                                 const EnumerationOptions&);
  friend SpecificationTable enumerate_compatible_serial(const PointSet&, const BoundaryCondition&,
                                                        const Volume&, const Potential&,
                                                        const EnumerationOptions&);
  SpecificationTable(PointSet ps, BoundaryCondition eta, Potential v, SpecificationDomain dom);
  void normalise();

  PointSet ps_;
  BoundaryCondition eta_;
  Potential v_;
  SpecificationDomain dom_;
  std::size_t width_ = 0;
  std::vector<std::uint8_t> perms_;
  std::vector<double> energy_;
  std::vector<double> prob_;
  double log_z_ = 0.0;
};

/// OpenMP over first-position blocks of the lexicographic order.
SpecificationTable enumerate_compatible(const PointSet& ps, const BoundaryCondition& eta,
                                        const Volume& volume, const Potential& v,
                                        const EnumerationOptions& opts = {});

/// Single-threaded reference; output is identical to enumerate_compatible.
SpecificationTable enumerate_compatible_serial(const PointSet& ps, const BoundaryCondition& eta,
                                               const Volume& volume, const Potential& v,
                                               const EnumerationOptions& opts = {});

class StateView {
 public:
  StateView(const SpecificationTable& table, std::size_t state) : table_(&table), state_(state) {}
  std::size_t id() const { return state_; }
  Index sigma(Index x) const { return table_->image_of(state_, x); }
  Index sigma_inv(Index t) const { return table_->preimage_of(state_, t); }
  double energy() const { return table_->energy(state_); }

 private:
  const SpecificationTable* table_;
  std::size_t state_;
};

double exact_probability(const SpecificationTable& table,
                         const std::function<bool(const StateView&)>& event);

/// min(1, exp(delta)) with delta = H(sigma) - H(sigma_xy).
inline double metropolis_acceptance(double delta) { return delta >= 0.0 ? 1.0 : std::exp(delta); }

/// P(s -> t) of the swap chain on the table's state space.
double transition_probability(const SpecificationTable& table, std::size_t s, std::size_t t);

// ---------------------------------------------------------------------------
// Metropolis swap chain

struct ChainConfig {
  std::uint64_t seed = 1;
  std::int64_t steps = 0;
  std::int64_t burn_in = 0;
  std::int64_t thinning = 1;
  int chains = 1;
  int batches = 20;

  void validate() const;
  std::int64_t samples_per_chain() const;
};

using ObsKey = std::vector<Index>;

struct Observable {
  std::string name;
  std::function<ObsKey(const WindowPermutation&)> key;
};

/// Images of the given points, in order; keys the full state when the points
/// are the specification domain.
Observable state_observable(std::vector<Index> points, std::string name = "state");
/// (sigma(x), sigma^{-1}(x)) for every x of the window, flattened.
Observable window_observable(std::vector<Index> window, std::string name = "window");

/// Per-observable counts split into batches for batch-means error bars.
class EmpiricalDistribution {
 public:
  EmpiricalDistribution() = default;
  EmpiricalDistribution(std::vector<std::string> names, int batches);

  /// One sample: keys[i] is the value of observable i.
  void record(const std::vector<ObsKey>& keys, int batch);
  void merge(const EmpiricalDistribution& other);

  const std::vector<std::string>& names() const { return names_; }
  std::size_t index_of(const std::string& name) const;
  int batches() const { return batches_; }
  std::int64_t samples() const;
  std::int64_t batch_samples(int b) const { return batch_sizes_[static_cast<std::size_t>(b)]; }

  const std::map<ObsKey, std::vector<std::int64_t>>& counts(std::size_t obs) const {
    return counts_[obs];
  }
  std::int64_t count(std::size_t obs, const ObsKey& key) const;
  double frequency(std::size_t obs, const ObsKey& key) const;
  /// Batch-means standard error of the frequency.
  double standard_error(std::size_t obs, const ObsKey& key) const;
  std::map<ObsKey, double> frequencies(std::size_t obs) const;

 private:
  std::vector<std::string> names_;
  int batches_ = 1;
  std::vector<std::int64_t> batch_sizes_;
  std::vector<std::map<ObsKey, std::vector<std::int64_t>>> counts_;
};

/// Single Metropolis swap chain on the domain of gamma_Lambda(.|eta),
/// started from eta itself.
class SwapChain {
 public:
  SwapChain(const PointSet& ps, const BoundaryCondition& eta, const Volume& volume,
            const Potential& v, std::uint64_t seed);

  bool step();
  const WindowPermutation& state() const { return sigma_; }
  const std::vector<Index>& domain() const { return domain_; }
  std::int64_t accepted() const { return accepted_; }
  std::int64_t proposed() const { return proposed_; }

 private:
  Potential v_;
  WindowPermutation sigma_;
  std::vector<Index> domain_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::int64_t accepted_ = 0;
  std::int64_t proposed_ = 0;
};

using SampleVisitor = std::function<void(const WindowPermutation&, std::int64_t sample)>;

/// Runs chain `chain` of cfg and calls `visit` on every retained sample.
void mcmc_visit(const PointSet& ps, const BoundaryCondition& eta, const Volume& volume,
                const Potential& v, const ChainConfig& cfg, int chain, const SampleVisitor& visit);

/// All chains of cfg, in parallel; merge order is the chain order.
EmpiricalDistribution mcmc_run(const PointSet& ps, const BoundaryCondition& eta,
                               const Volume& volume, const Potential& v, const ChainConfig& cfg,
                               const std::vector<Observable>& observables);

/// Reference: the same chains run one after another.
EmpiricalDistribution mcmc_run_serial(const PointSet& ps, const BoundaryCondition& eta,
                                      const Volume& volume, const Potential& v,
                                      const ChainConfig& cfg,
                                      const std::vector<Observable>& observables);

/// Retained samples of all chains, chain-major.
std::vector<WindowPermutation> mcmc_samples(const PointSet& ps, const BoundaryCondition& eta,
                                            const Volume& volume, const Potential& v,
                                            const ChainConfig& cfg);

using Distribution = std::map<ObsKey, double>;

/// Half the L1 distance; keys missing on one side count as 0 there.
double tv_distance(const Distribution& p, const Distribution& q);

/// Law of `observable` under the exact table.
Distribution table_distribution(const SpecificationTable& table, const Observable& observable);

}  // namespace permugibbs
