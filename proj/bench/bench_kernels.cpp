#include "cpm/asymptotics.hpp"
#include "cpm/graphsim.hpp"
#include "cpm/weights.hpp"

#include <benchmark/benchmark.h>

namespace {

cpm::GraphSimConfig sim_config(std::uint64_t trials) {
  return cpm::GraphSimConfig::with_kappa(2000, 4.0, cpm::WeightModel::exponential(), {1.0}, trials, 7);
}

void BM_DmaxSerial(benchmark::State& state) {
  const auto cfg = sim_config(static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cpm::sample_dmax_serial(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_DmaxParallel(benchmark::State& state) {
  const auto cfg = sim_config(static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cpm::sample_dmax_parallel(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_CompareSerial(benchmark::State& state) {
  const auto model = cpm::WeightModel::unit();
  for (auto _ : state) benchmark::DoNotOptimize(cpm::compare_sweep_serial(model, 1.0, state.range(0)));
}

void BM_CompareParallel(benchmark::State& state) {
  const auto model = cpm::WeightModel::unit();
  for (auto _ : state) benchmark::DoNotOptimize(cpm::compare_sweep(model, 1.0, state.range(0)));
}

}  // namespace

BENCHMARK(BM_DmaxSerial)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DmaxParallel)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CompareSerial)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CompareParallel)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
