#include "kepler_balance/kernel.hpp"
#include "kepler_balance/parallel.hpp"
#include "kepler_balance/profiles.hpp"

#include <benchmark/benchmark.h>

namespace {

// Tables of moments for a W[f] density, recomputed from scratch on every iteration.
void moments_bench(benchmark::State& state, kb::Execution mode) {
  const kb::Density density = kb::Density::monge_ampere(kb::RadialProfile::phi_v_candidate(2.0), 2);
  const int k_max = static_cast<int>(state.range(0));
  for (auto _ : state) {
    kb::MomentEngine engine(density, 1e-13);
    engine.ensure(k_max, mode);
    benchmark::DoNotOptimize(engine.moment(k_max).value);
  }
  state.counters["threads"] = mode == kb::Execution::parallel ? kb::thread_count() : 1;
  state.SetItemsProcessed(state.iterations() * (k_max + 1));
}

void BM_moments_serial(benchmark::State& state) { moments_bench(state, kb::Execution::serial); }
void BM_moments_parallel(benchmark::State& state) { moments_bench(state, kb::Execution::parallel); }

}  // namespace

BENCHMARK(BM_moments_serial)->Arg(256)->Arg(2048)->Arg(8192)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_moments_parallel)->Arg(256)->Arg(2048)->Arg(8192)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
