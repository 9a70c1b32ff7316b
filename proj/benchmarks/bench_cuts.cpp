#include <benchmark/benchmark.h>

#include "pwcvx/cuts.hpp"
#include "pwcvx/formulation.hpp"
#include "pwcvx/problems.hpp"
#include "pwcvx/rng.hpp"

using namespace pwcvx;

namespace {

void BM_MakeCut(benchmark::State& state) {
  SeparableProblem p = to_separable(gen_nck(1, NckFamily::Trig, 1));
  Model m = build_mcm(p);
  const PerspectiveTerm& t = m.terms.front();
  Rng rng(3);
  for (auto _ : state) {
    double q = rng.uniform(t.q_lo, t.q_hi);
    Cut c = make_cut(t, 0, q);
    benchmark::DoNotOptimize(c.ax);
  }
}

void BM_Separate(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  SeparableProblem p = to_separable(gen_nck(n, NckFamily::Trig, 5));
  Model m = build_mcm(p);
  Rng rng(11);
  Assignment a(static_cast<size_t>(m.n_vars()));
  for (int j = 0; j < m.n_vars(); ++j) {
    const ModelVar& v = m.vars[static_cast<size_t>(j)];
    a[static_cast<size_t>(j)] = rng.uniform(v.lo, v.hi);
  }
  for (auto _ : state) {
    std::vector<Cut> cuts = separate(m, a);
    benchmark::DoNotOptimize(cuts.size());
  }
}

void BM_InitialCuts(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  SeparableProblem p = to_separable(gen_nck(n, NckFamily::Trig, 5));
  Model m = build_mcm(p);
  for (auto _ : state) {
    std::vector<Cut> cuts = initial_cuts(m, 3);
    benchmark::DoNotOptimize(cuts.size());
  }
}

}  // namespace

BENCHMARK(BM_MakeCut);
BENCHMARK(BM_Separate)->Arg(10)->Arg(50)->Arg(200);
BENCHMARK(BM_InitialCuts)->Arg(10)->Arg(50)->Arg(200);

BENCHMARK_MAIN();
