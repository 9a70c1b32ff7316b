#include <benchmark/benchmark.h>

#include "pwcvx/rng.hpp"
#include "pwcvx/simplex.hpp"

using namespace pwcvx;

namespace {

// Dense random LP with a guaranteed feasible interior point.
LinearProgram random_lp(int n, int m, std::uint64_t seed) {
  Rng rng(seed);
  LinearProgram lp;
  lp.obj.resize(static_cast<size_t>(n));
  lp.lo.assign(static_cast<size_t>(n), 0.0);
  lp.hi.assign(static_cast<size_t>(n), 10.0);
  for (double& c : lp.obj) c = rng.uniform(-1.0, 1.0);
  std::vector<double> x0(static_cast<size_t>(n));
  for (double& v : x0) v = rng.uniform(1.0, 9.0);
  for (int i = 0; i < m; ++i) {
    LpRow row;
    double act = 0;
    for (int j = 0; j < n; ++j) {
      double c = rng.uniform(-2.0, 2.0);
      row.terms.push_back({j, c});
      act += c * x0[static_cast<size_t>(j)];
    }
    row.sense = RowSense::LE;
    row.rhs = act + rng.uniform(0.5, 5.0);
    lp.rows.push_back(std::move(row));
  }
  return lp;
}

void BM_SimplexSolve(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  LinearProgram lp = random_lp(n, n, 12345);
  for (auto _ : state) {
    LpSolution sol = solve_lp(lp);
    benchmark::DoNotOptimize(sol.objective);
  }
}

void BM_SimplexWarmRows(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  LinearProgram lp = random_lp(n, n, 999);
  Rng rng(7);
  for (auto _ : state) {
    state.PauseTiming();
    Simplex sx(lp);
    sx.solve();
    std::vector<LpRow> extra;
    for (int k = 0; k < 5; ++k) {
      LpRow row;
      double bound = 0;
      for (int j = 0; j < n; ++j) {
        double c = rng.uniform(-1.0, 1.0);
        row.terms.push_back({j, c});
        bound += std::max(c * lp.lo[static_cast<size_t>(j)],
                          c * lp.hi[static_cast<size_t>(j)]);
      }
      row.rhs = bound - 1.0;
      extra.push_back(std::move(row));
    }
    state.ResumeTiming();
    sx.add_rows(extra);
    LpStatus st = sx.solve();
    benchmark::DoNotOptimize(st);
  }
}

}  // namespace

BENCHMARK(BM_SimplexSolve)->Arg(20)->Arg(60)->Arg(120);
BENCHMARK(BM_SimplexWarmRows)->Arg(20)->Arg(60);

BENCHMARK_MAIN();
