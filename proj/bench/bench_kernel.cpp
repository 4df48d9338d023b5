// Reference versus parallel propagator on the d = 40, F = 10 reference comb.

#include "afc/experiments.hpp"
#include "afc/kernel.hpp"
#include "afc/solver.hpp"

#include <benchmark/benchmark.h>

#include <omp.h>

#include <vector>

using namespace afc;

namespace {

DiscretizedComb bench_comb() {
  DiscretizedComb c = discretize_comb(reference_comb(40.0, 10.0), 1.0, 7, 1e-3);
  calibrate_coupling(c, 40.0, false);
  return c;
}

void run_steps(benchmark::State& state, KernelKind kind) {
  static const DiscretizedComb comb = bench_comb();
  const int nz = static_cast<int>(state.range(0));
  const int steps = 64;
  if (kind == KernelKind::parallel) omp_set_num_threads(static_cast<int>(state.range(1)));
  Propagator prop(comb, nz, 1e-8, Direction::forward, kind);
  for (auto _ : state) {
    for (int k = 0; k < steps; ++k) prop.step(k < 8 ? cplx(1.0, 0.0) : cplx(0.0, 0.0));
    benchmark::DoNotOptimize(prop.exit_field());
  }
  state.SetItemsProcessed(state.iterations() * steps * nz * static_cast<long>(comb.size()));
}

void BM_reference(benchmark::State& state) { run_steps(state, KernelKind::reference); }
void BM_parallel(benchmark::State& state) { run_steps(state, KernelKind::parallel); }

}  // namespace

BENCHMARK(BM_reference)->Args({32, 1})->Args({128, 1})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_parallel)->ArgsProduct({{32, 128}, {1, 2, 4}})->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
