// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "pilotforge/capacity.hpp"
#include "pilotforge/io.hpp"
#include "pilotforge/link.hpp"
#include "pilotforge/montecarlo.hpp"
#include "pilotforge/parallel.hpp"

using namespace pilotforge;

namespace {

struct Reference {
  NetworkConfig config;
  SchemeDesign design;
};

const Reference& reference() {
  static const Reference r = [] {
    const Scenario s = table1_scenario();
    const NetworkConfig config = s.network();
    return Reference{config, design_scheme(Scheme::kGwbe, s.sinr_targets(), config)};
  }();
  return r;
}

RegionSamplingSetup region_setup(std::int64_t samples) {
  RegionSamplingSetup setup;
  setup.num_cells = 4;
  setup.users_per_cell = 4;
  setup.tau = 3;
  setup.fixed_tail = {0.20};
  setup.samples = samples;
  setup.seed = 7;
  return setup;
}

void BM_SimulateSerial(benchmark::State& state) {
  const auto& r = reference();
  const int antennas = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        simulate_serial(r.config, r.design.pilots, r.design.power, antennas, 200, 1));
  }
}

void BM_SimulateParallel(benchmark::State& state) {
  const auto& r = reference();
  const int antennas = static_cast<int>(state.range(0));
  set_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate(r.config, r.design.pilots, r.design.power, antennas, 200, 1));
  }
  apply_thread_limit();
}

void BM_RegionSerial(benchmark::State& state) {
  const RegionSamplingSetup setup = region_setup(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_regions_serial(setup));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_RegionParallel(benchmark::State& state) {
  const RegionSamplingSetup setup = region_setup(state.range(0));
  set_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(sample_regions(setup));
  state.SetItemsProcessed(state.iterations() * state.range(0));
  apply_thread_limit();
}

}  // namespace

BENCHMARK(BM_SimulateSerial)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateParallel)
    ->ArgsProduct({{100, 300}, {1, 2, 4}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK(BM_RegionSerial)->Arg(100'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RegionParallel)
    ->ArgsProduct({{100'000}, {1, 2, 4}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
