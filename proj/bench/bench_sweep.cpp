// OpenMP sweep vs the serial reference on the triple-bit storage scenario.
#include "qmem/scenarios.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

using namespace qmem;

namespace {

const Scenario& storage_scenario()
{
    static const Scenario sc = triple_bit_storage({});
    return sc;
}

void BM_sweep_serial(benchmark::State& state)
{
    const Scenario& sc = storage_scenario();
    const DetuningGrid grid = build_grid(sc.ensemble);
    for (auto _ : state) benchmark::DoNotOptimize(sweep_serial(sc.system, sc.sequence, grid));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.deltas.size()));
}

void BM_sweep_openmp(benchmark::State& state)
{
    const Scenario& sc = storage_scenario();
    const DetuningGrid grid = build_grid(sc.ensemble);
    omp_set_num_threads(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(sweep(sc.system, sc.sequence, grid));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.deltas.size()));
}

}  // namespace

BENCHMARK(BM_sweep_serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_sweep_openmp)->RangeMultiplier(2)->Range(1, 8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
