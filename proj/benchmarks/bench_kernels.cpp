#include <benchmark/benchmark.h>

#include "kac/coupling.hpp"
#include "kac/field_cache.hpp"
#include "kac/rng.hpp"
#include "kac/sampler.hpp"

using namespace kac;

namespace {

SpinConfig random_config(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed, 0);
  std::vector<Spin> v(n);
  for (Spin& s : v) s = rng.uniform() < 0.5 ? Spin{1} : Spin{-1};
  return SpinConfig(0, std::move(v), BoundaryCondition::plus_ones());
}

void BM_TailSum(benchmark::State& state) {
  std::int64_t r = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tail_sum(r));
    r = r % 100000 + 1;
  }
}
BENCHMARK(BM_TailSum);

void BM_Hamiltonian(benchmark::State& state) {
  const CouplingSpec spec = CouplingSpec::from_half_range(16, 5.0);
  const SpinConfig sigma = random_config(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(hamiltonian(spec, sigma));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Hamiltonian)->RangeMultiplier(4)->Range(256, 4096)->Complexity();

void BM_Flips(benchmark::State& state, UpdateStrategy strategy) {
  const CouplingSpec spec = CouplingSpec::from_half_range(32, 2.0);
  SpinConfig sigma = random_config(static_cast<std::size_t>(state.range(0)), 2);
  FieldCache cache(spec, sigma, strategy);
  CounterRng rng(3, 0);
  for (auto _ : state) apply_flip(sigma, cache, static_cast<std::size_t>(rng.below(sigma.size())));
  cache.flush();
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK_CAPTURE(BM_Flips, eager, UpdateStrategy::Eager)->Arg(4096)->Arg(16384);
BENCHMARK_CAPTURE(BM_Flips, lazy, UpdateStrategy::Lazy)->Arg(4096)->Arg(16384);

void BM_Sweep(benchmark::State& state) {
  const CouplingSpec spec = CouplingSpec::from_half_range(16, 5.0);
  ChainState chain(spec, SpinConfig::uniform(0, static_cast<std::size_t>(state.range(0)), 1,
                                             BoundaryCondition::plus_ones()),
                   3.0, 4);
  for (auto _ : state) mcmc_sweep(chain, Kernel::Metropolis);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sweep)->Arg(4096)->Arg(32768);

}  // namespace

BENCHMARK_MAIN();
