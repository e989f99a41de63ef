#include <benchmark/benchmark.h>

#include "permugibbs/sampler.hpp"

using namespace permugibbs;

namespace {

const PointSet kZ = PointSet::integer_lattice();
const Potential kV = Potential::power(1.0, 2.0);

Volume volume_of(benchmark::State& state) { return Volume::range(0, state.range(0) - 1); }

void BM_EnumerateSerial(benchmark::State& state) {
  const Volume vol = volume_of(state);
  for (auto _ : state) {
    auto t = enumerate_compatible_serial(kZ, BoundaryCondition::shift(0), vol, kV);
    benchmark::DoNotOptimize(t.log_partition());
  }
}

void BM_EnumerateParallel(benchmark::State& state) {
  const Volume vol = volume_of(state);
  for (auto _ : state) {
    auto t = enumerate_compatible(kZ, BoundaryCondition::shift(0), vol, kV);
    benchmark::DoNotOptimize(t.log_partition());
  }
}

ChainConfig chain_config() {
  ChainConfig cfg;
  cfg.seed = 5;
  cfg.steps = 200000;
  cfg.burn_in = 1000;
  cfg.thinning = 10;
  cfg.chains = 4;
  return cfg;
}

void BM_McmcSerial(benchmark::State& state) {
  const Volume vol = volume_of(state);
  const auto obs = state_observable(vol.points());
  for (auto _ : state) {
    auto d = mcmc_run_serial(kZ, BoundaryCondition::shift(0), vol, kV, chain_config(), {obs});
    benchmark::DoNotOptimize(d.samples());
  }
}

void BM_McmcParallel(benchmark::State& state) {
  const Volume vol = volume_of(state);
  const auto obs = state_observable(vol.points());
  for (auto _ : state) {
    auto d = mcmc_run(kZ, BoundaryCondition::shift(0), vol, kV, chain_config(), {obs});
    benchmark::DoNotOptimize(d.samples());
  }
}

}  // namespace

BENCHMARK(BM_EnumerateSerial)->Arg(7)->Arg(8)->Arg(9)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnumerateParallel)->Arg(7)->Arg(8)->Arg(9)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_McmcSerial)->Arg(5)->Arg(9)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_McmcParallel)->Arg(5)->Arg(9)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
