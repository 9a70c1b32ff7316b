#include <benchmark/benchmark.h>

#include "pwcvx/formulation.hpp"
#include "pwcvx/problems.hpp"
#include "pwcvx/solver.hpp"

using namespace pwcvx;

namespace {

void run_root(benchmark::State& state, FormulationKind kind) {
  int n = static_cast<int>(state.range(0));
  SeparableProblem p = to_separable(gen_nck(n, NckFamily::Trig, 21));
  Model m = build_model(p, kind);
  SolveConfig cfg;
  cfg.max_root_rounds = 40;
  for (auto _ : state) {
    RootResult r = solve_root_relaxation(m, cfg);
    benchmark::DoNotOptimize(r.bound);
  }
}

void BM_RootIm(benchmark::State& state) {
  run_root(state, FormulationKind::IM);
}
void BM_RootMcm(benchmark::State& state) {
  run_root(state, FormulationKind::MCM);
}
void BM_RootCcm(benchmark::State& state) {
  run_root(state, FormulationKind::CCM);
}

void BM_BuildModel(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  SeparableProblem p = to_separable(gen_nck(n, NckFamily::Trig, 21));
  for (auto _ : state) {
    Model m = build_mcm(p);
    benchmark::DoNotOptimize(m.n_vars());
  }
}

}  // namespace

BENCHMARK(BM_RootIm)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RootMcm)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RootCcm)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildModel)->Arg(20)->Arg(100);

BENCHMARK_MAIN();
