#include <benchmark/benchmark.h>

#include "yamabe/analysis.hpp"
#include "yamabe/flow.hpp"
#include "yamabe/parallel.hpp"

using namespace yamabe;

namespace {

FlowProblem disk_problem(int radius) {
  Triangulation t = build_hexagonal_disk(radius);
  ConformalFactor u0 = random_bump(t, 0, radius / 2, 0.05, 1);
  PLMetric d = PLMetric::constant(t);
  return FlowProblem::with_boundary_pinned(std::move(t), std::move(d), std::move(u0),
                                           FlowVariant::kStandard);
}

void BM_Curvature(benchmark::State& state) {
  const FlowProblem p = disk_problem(static_cast<int>(state.range(0)));
  const PLMetric l = conformal_scale(p.mesh, p.metric, p.initial);
  for (auto _ : state) benchmark::DoNotOptimize(curvature(p.mesh, l));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.mesh.face_count()));
}
BENCHMARK(BM_Curvature)->Arg(10)->Arg(40)->Arg(100);

void BM_CotWeights(benchmark::State& state) {
  const FlowProblem p = disk_problem(static_cast<int>(state.range(0)));
  const PLMetric l = conformal_scale(p.mesh, p.metric, p.initial);
  for (auto _ : state) benchmark::DoNotOptimize(cot_weights(p.mesh, l));
}
BENCHMARK(BM_CotWeights)->Arg(10)->Arg(40)->Arg(100);

void BM_Rk4Step(benchmark::State& state) {
  set_worker_count(static_cast<unsigned>(state.range(1)));
  const FlowProblem p = disk_problem(static_cast<int>(state.range(0)));
  FlowState s{0.0, p.initial};
  for (auto _ : state) {
    s = step(p, s, 1e-3);
    benchmark::DoNotOptimize(s.u.values.data());
  }
  set_worker_count(1);
}
BENCHMARK(BM_Rk4Step)->Args({10, 1})->Args({60, 1})->Args({60, 4});

void BM_SemilinearRhs(benchmark::State& state) {
  Triangulation t = build_hexagonal_disk(static_cast<int>(state.range(0)));
  ConformalFactor u0 = random_uniform_bump(t, 0, static_cast<int>(state.range(0)) / 2, 0.1, 2);
  PLMetric d = PLMetric::constant(t);
  const FlowProblem p = FlowProblem::with_boundary_pinned(std::move(t), std::move(d), u0,
                                                          FlowVariant::kSemilinearHex);
  const FlowState s{0.0, ConformalFactor(u0.values)};
  for (auto _ : state) benchmark::DoNotOptimize(semilinear_rhs(p, s));
}
BENCHMARK(BM_SemilinearRhs)->Arg(10)->Arg(40);

}  // namespace

BENCHMARK_MAIN();
