#include <benchmark/benchmark.h>

#include "stoqmc/generators.hpp"
#include "stoqmc/ising.hpp"

namespace {

using namespace stoqmc;

void BM_SwendsenWangSweep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng gen(5);
  const ClassicalIsingModel m = random_ferromagnetic_ising(n, 4.0 / n, 1.0, gen);
  SpinConfig s(static_cast<std::size_t>(n), 1);
  Rng rng(6);
  for (auto _ : state) sw_sweep(m, 0.8, s, rng);
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SwendsenWangSweep)->Arg(64)->Arg(1024)->Arg(16384);

void BM_GrayCodeEnumeration(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng gen(8);
  const ClassicalIsingModel m = random_ferromagnetic_ising(n, 0.3, 1.0, gen);
  for (auto _ : state) benchmark::DoNotOptimize(partition_exact_enum(m));
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << n));
}
BENCHMARK(BM_GrayCodeEnumeration)->Arg(12)->Arg(18)->Arg(22);

}  // namespace
