// Serial reference vs OpenMP for the grid kernels. Arg 0 = serial, 1 = parallel.
#include <benchmark/benchmark.h>

#include "collapse/batch.hpp"
#include "collapse/collapse.hpp"
#include "collapse/families.hpp"
#include "collapse/quantile.hpp"

namespace {

using namespace collapse;

Execution mode(const benchmark::State& state) { return state.range(0) == 0 ? Execution::serial : Execution::parallel; }

const ContinuousModel& gaussian() {
  static const ModelPtr m = make_model("linear-interaction", {{"alpha3", 0.5}, {"w_slope", 1.0}});
  return *m;
}

void BM_DependenceField(benchmark::State& state) {
  const auto grid = auto_grid(gaussian(), 20, 20, 7);
  for (auto _ : state) {
    auto f = dependence_field(gaussian(), grid, DepKind::distribution, DepScope::marginal, {}, mode(state));
    benchmark::DoNotOptimize(f.values.data());
  }
}
BENCHMARK(BM_DependenceField)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_QuantileA(benchmark::State& state) {
  static const ModelPtr m = make_model("uniform-shift", {{"w_shift", 0.0}});
  CheckContext ctx;
  ctx.grid = auto_grid(*m, 10, 10, 3);
  ctx.exec = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(check_A_collapsibility_quantile(*m, ctx).verdict.max_violation);
}
BENCHMARK(BM_QuantileA)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Batch(benchmark::State& state) {
  BatchOptions o;
  o.count = 200;
  o.exec = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(run_batch(Suite::lattice, o).passed);
}
BENCHMARK(BM_Batch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
