#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "permugibbs/energy.hpp"
#include "permugibbs/sampler.hpp"

namespace permugibbs {

struct CheckRow {
  std::string params;
  double bound = 0.0;
  double observed = 0.0;
  double margin = 0.0;  // >= 0 (or the row's own tolerance) means satisfied
  bool pass = true;
};

struct CheckReport {
  std::string id;
  std::uint64_t seed = 0;
  std::vector<CheckRow> rows;
  double runtime_seconds = 0.0;

  bool passed() const;
  std::size_t violations() const;
  double worst_margin() const;
};

/// Overrides for the named checks; unset fields keep each check's defaults.
struct CheckParams {
  std::uint64_t seed = 1;
  std::optional<Potential> potential;
  std::size_t cap = 9;
  std::int64_t steps = 0;  // per chain, 0 = default
  int chains = 0;          // 0 = default
};

const std::vector<std::string>& check_ids();
bool is_check_id(const std::string& id);

/// Runs one named check; throws std::invalid_argument for unknown ids.
CheckReport named_check(const std::string& id, const CheckParams& params = {});

// ---------------------------------------------------------------------------
// Scans

struct ScanResult {
  std::vector<Volume> volumes;
  std::vector<Index> window;
  /// Window marginal per volume (first boundary for coupling scans).
  std::vector<Distribution> marginals;
  std::vector<Distribution> other_marginals;
  /// volume_scan: pairwise[i][k] = TV between volumes i and k.
  std::vector<std::vector<double>> pairwise;
  /// volume_scan: TV(i, i+1); coupling_scan: TV between boundaries at volume i.
  std::vector<double> tv;
  std::vector<double> tv_stderr;
  std::int64_t samples_per_volume = 0;
};

struct ScanOptions {
  ChainConfig chain;
  int bootstrap = 200;
};

void validate_nested(const std::vector<Volume>& volumes, const std::vector<Index>& window);

ScanResult volume_scan(const PointSet& ps, const BoundaryCondition& eta,
                       const std::vector<Volume>& volumes, const std::vector<Index>& window,
                       const Potential& v, const ScanOptions& opts);

/// Throws when the two boundaries carry different or infinite flows.
ScanResult coupling_scan(const PointSet& ps, const BoundaryCondition& eta,
                         const BoundaryCondition& eta2, const std::vector<Volume>& volumes,
                         const std::vector<Index>& window, const Potential& v,
                         const ScanOptions& opts);

/// Bootstrap standard error of TV between two batched empirical laws.
double tv_bootstrap_stderr(const EmpiricalDistribution& a, std::size_t obs_a,
                           const EmpiricalDistribution& b, std::size_t obs_b, int replicates,
                           std::uint64_t seed);

// ---------------------------------------------------------------------------
// Cuts

struct CutSample {
  std::vector<Index> cuts;      // dual points j (between j and j + 1)
  std::vector<Index> pre_cuts;  // k-pre-cuts
  /// (ja, jb, strands) for every pair of cuts ja < jb
  std::vector<std::array<Index, 3>> strands;
};

struct CutStatistics {
  Index n = 0;
  Index k = 0;
  std::vector<CutSample> samples;
  std::size_t pairs_checked = 0;
  std::size_t strand_violations = 0;  // pairs with strands != |n|
  std::size_t nesting_violations = 0;  // cuts that are not k-pre-cuts (k >= |n|)
};

CutStatistics cut_statistics(const std::vector<WindowPermutation>& samples,
                             const std::vector<Index>& duals, Index n, Index k);

// ---------------------------------------------------------------------------

struct KThreshold {
  Index n = 0;
  double c_n = 0.0;
  std::array<double, 5> terms{};
  Index value = 0;
};

/// Smallest integer k >= max{n+1, c c_psi(nc, 2c), c c_psi(0, 2c) + nc^2, 24c^3, 33nc^2 + 1}.
KThreshold k_threshold(Index n, double c_n, const Potential& v);

}  // namespace permugibbs
