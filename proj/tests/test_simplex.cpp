#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstddef>
#include <vector>

#include "doctest.h"
#include "pwcvx/rng.hpp"
#include "pwcvx/simplex.hpp"

using namespace pwcvx;

namespace {

// ---------------------------------------------------------------------------
// Independent oracle: textbook two-phase tableau simplex with Bland's
// rule throughout. Bounds are turned into explicit rows, so it shares
// nothing with the production bounded-variable engine.
// ---------------------------------------------------------------------------

enum class NaiveStatus { Optimal, Infeasible, Fail };

struct NaiveResult {
  NaiveStatus status = NaiveStatus::Fail;
  double objective = 0;
};

NaiveResult naive_solve(const LinearProgram& lp) {
  int n = lp.n_cols();
  double shift = 0;
  for (int j = 0; j < n; ++j)
    shift += lp.obj[static_cast<size_t>(j)] * lp.lo[static_cast<size_t>(j)];

  // rows over u = x - lo >= 0, plus one u_j <= hi_j - lo_j row per column
  struct Row {
    std::vector<double> a;
    double rhs = 0;
    int sense = 0;  // 0 <=, 1 >=, 2 ==
  };
  std::vector<Row> rows;
  for (const LpRow& r : lp.rows) {
    Row rr;
    rr.a.assign(static_cast<size_t>(n), 0.0);
    for (const LinTerm& t : r.terms) rr.a[static_cast<size_t>(t.var)] += t.coeff;
    double adj = 0;
    for (int j = 0; j < n; ++j)
      adj += rr.a[static_cast<size_t>(j)] * lp.lo[static_cast<size_t>(j)];
    rr.rhs = r.rhs - adj;
    rr.sense = r.sense == RowSense::LE ? 0 : r.sense == RowSense::GE ? 1 : 2;
    rows.push_back(std::move(rr));
  }
  for (int j = 0; j < n; ++j) {
    Row rr;
    rr.a.assign(static_cast<size_t>(n), 0.0);
    rr.a[static_cast<size_t>(j)] = 1.0;
    rr.rhs = lp.hi[static_cast<size_t>(j)] - lp.lo[static_cast<size_t>(j)];
    rr.sense = 0;
    rows.push_back(std::move(rr));
  }
  for (Row& r : rows)
    if (r.rhs < 0) {
      for (double& v : r.a) v = -v;
      r.rhs = -r.rhs;
      if (r.sense != 2) r.sense = 1 - r.sense;
    }

  int m = static_cast<int>(rows.size());
  int nslack = 0, nart = 0;
  for (const Row& r : rows) {
    if (r.sense != 2) ++nslack;
    if (r.sense != 0) ++nart;
  }
  int art0 = n + nslack;
  int width = n + nslack + nart + 1;  // last column is the rhs
  std::vector<std::vector<double>> T(
      static_cast<size_t>(m), std::vector<double>(static_cast<size_t>(width), 0.0));
  std::vector<int> basis(static_cast<size_t>(m), -1);
  int sc = n, ac = art0;
  for (int i = 0; i < m; ++i) {
    auto& t = T[static_cast<size_t>(i)];
    const Row& r = rows[static_cast<size_t>(i)];
    for (int j = 0; j < n; ++j) t[static_cast<size_t>(j)] = r.a[static_cast<size_t>(j)];
    t[static_cast<size_t>(width - 1)] = r.rhs;
    if (r.sense == 0) {
      t[static_cast<size_t>(sc)] = 1.0;
      basis[static_cast<size_t>(i)] = sc++;
    } else if (r.sense == 1) {
      t[static_cast<size_t>(sc++)] = -1.0;
      t[static_cast<size_t>(ac)] = 1.0;
      basis[static_cast<size_t>(i)] = ac++;
    } else {
      t[static_cast<size_t>(ac)] = 1.0;
      basis[static_cast<size_t>(i)] = ac++;
    }
  }

  auto pivot = [&](int pr, int pc) {
    auto& prow = T[static_cast<size_t>(pr)];
    double pv = prow[static_cast<size_t>(pc)];
    for (double& v : prow) v /= pv;
    for (int i = 0; i < m; ++i) {
      if (i == pr) continue;
      auto& row = T[static_cast<size_t>(i)];
      double f = row[static_cast<size_t>(pc)];
      if (f == 0.0) continue;
      for (int j = 0; j < width; ++j)
        row[static_cast<size_t>(j)] -= f * prow[static_cast<size_t>(j)];
    }
    basis[static_cast<size_t>(pr)] = pc;
  };

  // Bland's rule; reduced costs recomputed from scratch every pivot,
  // slow and simple, which is the point of an oracle
  auto reduced = [&](const std::vector<double>& cost) {
    std::vector<double> red = cost;
    for (int i = 0; i < m; ++i) {
      double cb = cost[static_cast<size_t>(basis[static_cast<size_t>(i)])];
      if (cb == 0.0) continue;
      for (int j = 0; j < width - 1; ++j)
        red[static_cast<size_t>(j)] -=
            cb * T[static_cast<size_t>(i)][static_cast<size_t>(j)];
    }
    return red;
  };
  auto run = [&](const std::vector<double>& cost, int allowed) -> bool {
    for (long it = 0; it < 200000; ++it) {
      std::vector<double> red = reduced(cost);
      int enter = -1;
      for (int j = 0; j < allowed; ++j)
        if (red[static_cast<size_t>(j)] < -1e-9) {
          enter = j;
          break;
        }
      if (enter < 0) return true;
      int leave = -1;
      double best = 0;
      for (int i = 0; i < m; ++i) {
        double aij = T[static_cast<size_t>(i)][static_cast<size_t>(enter)];
        if (aij <= 1e-9) continue;
        double ratio = T[static_cast<size_t>(i)][static_cast<size_t>(width - 1)] / aij;
        if (leave < 0 || ratio < best - 1e-12 ||
            (ratio < best + 1e-12 &&
             basis[static_cast<size_t>(i)] < basis[static_cast<size_t>(leave)]))
          leave = i, best = ratio;
      }
      if (leave < 0) return false;  // unbounded: impossible with box rows
      pivot(leave, enter);
    }
    return false;
  };

  NaiveResult out;
  if (nart > 0) {
    std::vector<double> cost1(static_cast<size_t>(width), 0.0);
    for (int j = art0; j < art0 + nart; ++j) cost1[static_cast<size_t>(j)] = 1.0;
    if (!run(cost1, width - 1)) return out;
    double infeas = 0;
    for (int i = 0; i < m; ++i)
      if (basis[static_cast<size_t>(i)] >= art0)
        infeas += T[static_cast<size_t>(i)][static_cast<size_t>(width - 1)];
    if (infeas > 1e-6) {
      out.status = NaiveStatus::Infeasible;
      return out;
    }
    // drive leftover zero-level artificials out where a pivot exists
    for (int i = 0; i < m; ++i) {
      if (basis[static_cast<size_t>(i)] < art0) continue;
      for (int j = 0; j < art0; ++j)
        if (std::fabs(T[static_cast<size_t>(i)][static_cast<size_t>(j)]) > 1e-7) {
          pivot(i, j);
          break;
        }
    }
  }
  std::vector<double> cost2(static_cast<size_t>(width), 0.0);
  for (int j = 0; j < n; ++j) cost2[static_cast<size_t>(j)] = lp.obj[static_cast<size_t>(j)];
  if (!run(cost2, art0)) return out;  // artificials may not re-enter
  double obj = shift;
  for (int i = 0; i < m; ++i) {
    int b = basis[static_cast<size_t>(i)];
    if (b < n)
      obj += lp.obj[static_cast<size_t>(b)] *
             T[static_cast<size_t>(i)][static_cast<size_t>(width - 1)];
  }
  out.status = NaiveStatus::Optimal;
  out.objective = obj;
  return out;
}

double row_value(const LpRow& r, const std::vector<double>& x) {
  double v = 0;
  for (const LinTerm& t : r.terms) v += t.coeff * x[static_cast<size_t>(t.var)];
  return v;
}

bool primal_feasible(const LinearProgram& lp, const std::vector<double>& x,
                     double tol) {
  for (int j = 0; j < lp.n_cols(); ++j) {
    auto ju = static_cast<size_t>(j);
    if (x[ju] < lp.lo[ju] - tol || x[ju] > lp.hi[ju] + tol) return false;
  }
  for (const LpRow& r : lp.rows) {
    double v = row_value(r, x);
    if (r.sense == RowSense::LE && v > r.rhs + tol) return false;
    if (r.sense == RowSense::GE && v < r.rhs - tol) return false;
    if (r.sense == RowSense::EQ && std::fabs(v - r.rhs) > tol) return false;
  }
  return true;
}

LinearProgram random_lp(Rng& rng, int max_n, int max_m, bool biased_feasible) {
  int n = static_cast<int>(rng.uniform_int(2, max_n));
  int m = static_cast<int>(rng.uniform_int(1, max_m));
  LinearProgram lp;
  lp.obj.resize(static_cast<size_t>(n));
  lp.lo.resize(static_cast<size_t>(n));
  lp.hi.resize(static_cast<size_t>(n));
  std::vector<double> x0(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    auto ju = static_cast<size_t>(j);
    lp.obj[ju] = static_cast<double>(rng.uniform_int(-5, 5));
    lp.lo[ju] = static_cast<double>(rng.uniform_int(-3, 0));
    lp.hi[ju] = lp.lo[ju] + static_cast<double>(rng.uniform_int(1, 6));
    x0[ju] = rng.uniform(lp.lo[ju], lp.hi[ju]);
  }
  for (int i = 0; i < m; ++i) {
    LpRow r;
    for (int j = 0; j < n; ++j) {
      auto c = static_cast<double>(rng.uniform_int(-4, 4));
      if (c != 0.0) r.terms.push_back({j, c});
    }
    if (r.terms.empty()) r.terms.push_back({0, 1.0});
    double roll = rng.next_double();
    r.sense = roll < 0.5 ? RowSense::LE : roll < 0.8 ? RowSense::GE : RowSense::EQ;
    if (biased_feasible) {
      double act = row_value(r, x0);
      if (r.sense == RowSense::LE)
        r.rhs = act + rng.uniform(0.0, 4.0);
      else if (r.sense == RowSense::GE)
        r.rhs = act - rng.uniform(0.0, 4.0);
      else
        r.rhs = act;
    } else {
      r.rhs = static_cast<double>(rng.uniform_int(-6, 6));
    }
    lp.rows.push_back(std::move(r));
  }
  return lp;
}

}  // namespace

TEST_CASE("textbook miniatures") {
  {
    LinearProgram lp;
    lp.obj = {1.0};
    lp.lo = {0.0};
    lp.hi = {1.0};
    LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.objective == doctest::Approx(0.0));
  }
  {
    LinearProgram lp;
    lp.obj = {-1.0, -1.0};
    lp.lo = {0.0, 0.0};
    lp.hi = {5.0, 5.0};
    lp.rows.push_back({{{0, 1.0}, {1, 1.0}}, RowSense::LE, 1.0});
    LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.objective == doctest::Approx(-1.0).epsilon(1e-9));
  }
  {
    // equality row pins the optimum away from the box corner
    LinearProgram lp;
    lp.obj = {1.0, 2.0};
    lp.lo = {0.0, 0.0};
    lp.hi = {10.0, 10.0};
    lp.rows.push_back({{{0, 1.0}, {1, 1.0}}, RowSense::EQ, 4.0});
    LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.objective == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(s.x[0] == doctest::Approx(4.0).epsilon(1e-7));
  }
  {
    LinearProgram lp;
    lp.obj = {0.0, 0.0};
    lp.lo = {0.0, 0.0};
    lp.hi = {1.0, 1.0};
    lp.rows.push_back({{{0, 1.0}, {1, 1.0}}, RowSense::GE, 3.0});
    LpSolution s = solve_lp(lp);
    CHECK(s.status == LpStatus::Infeasible);
  }
}

TEST_CASE("negative lower bounds and GE rows") {
  LinearProgram lp;
  lp.obj = {1.0, 1.0, 1.0};
  lp.lo = {-2.0, -2.0, -2.0};
  lp.hi = {2.0, 2.0, 2.0};
  lp.rows.push_back({{{0, 1.0}, {1, 1.0}}, RowSense::GE, 1.0});
  lp.rows.push_back({{{1, 1.0}, {2, 1.0}}, RowSense::GE, 1.0});
  LpSolution s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::Optimal);
  // push the shared middle variable up, drop the outer two to -1 each
  CHECK(s.objective == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(s.x[1] == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("random instances agree with the tableau oracle") {
  Rng rng(20240601);
  int optimal = 0, infeasible = 0;
  for (int k = 0; k < 500; ++k) {
    bool biased = rng.next_double() < 0.75;
    int max_n = k % 10 == 9 ? 30 : 8;
    int max_m = k % 10 == 9 ? 20 : 6;
    LinearProgram lp = random_lp(rng, max_n, max_m, biased);
    NaiveResult want = naive_solve(lp);
    if (want.status == NaiveStatus::Fail) continue;  // oracle gave up; rare
    LpSolution got = solve_lp(lp);
    if (want.status == NaiveStatus::Infeasible) {
      ++infeasible;
      CHECK(got.status == LpStatus::Infeasible);
      continue;
    }
    ++optimal;
    REQUIRE(got.status == LpStatus::Optimal);
    CHECK(std::fabs(got.objective - want.objective) <=
          1e-6 * (1.0 + std::fabs(want.objective)));
    CHECK(primal_feasible(lp, got.x, 1e-6));
  }
  // the generator must exercise both outcomes
  CHECK(optimal > 300);
  CHECK(infeasible > 20);
}

TEST_CASE("appended rows match a fresh solve") {
  Rng rng(77);
  for (int k = 0; k < 60; ++k) {
    LinearProgram lp = random_lp(rng, 7, 4, true);
    Simplex sx(lp);
    if (sx.solve() != LpStatus::Optimal) continue;
    for (int extra = 0; extra < 3; ++extra) {
      LpRow r;
      int n = lp.n_cols();
      for (int j = 0; j < n; ++j) {
        auto c = static_cast<double>(rng.uniform_int(-3, 3));
        if (c != 0.0) r.terms.push_back({j, c});
      }
      if (r.terms.empty()) r.terms.push_back({0, 1.0});
      r.sense = RowSense::LE;
      // keep a known point feasible so the extension stays solvable
      double worst = 0;
      for (const LinTerm& t : r.terms)
        worst += std::max(t.coeff * lp.lo[static_cast<size_t>(t.var)],
                          t.coeff * lp.hi[static_cast<size_t>(t.var)]);
      r.rhs = worst - rng.uniform(0.0, 2.0);
      lp.rows.push_back(r);
      sx.add_rows({r});
      LpStatus warm = sx.solve();
      LpSolution fresh = solve_lp(lp);
      REQUIRE(warm == fresh.status);
      if (warm == LpStatus::Optimal)
        CHECK(std::fabs(sx.objective() - fresh.objective) <=
              1e-7 * (1.0 + std::fabs(fresh.objective)));
    }
  }
}

TEST_CASE("bound changes match a fresh solve") {
  Rng rng(78);
  for (int k = 0; k < 60; ++k) {
    LinearProgram lp = random_lp(rng, 7, 4, true);
    Simplex sx(lp);
    if (sx.solve() != LpStatus::Optimal) continue;
    for (int round = 0; round < 4; ++round) {
      int j = static_cast<int>(rng.uniform_int(0, lp.n_cols() - 1));
      auto ju = static_cast<size_t>(j);
      double nl = rng.uniform(lp.lo[ju], lp.hi[ju]);
      double nh = rng.uniform(nl, lp.hi[ju]);
      lp.lo[ju] = nl;
      lp.hi[ju] = nh;
      sx.set_col_bounds(j, nl, nh);
      LpStatus warm = sx.solve();
      LpSolution fresh = solve_lp(lp);
      REQUIRE(warm == fresh.status);
      if (warm == LpStatus::Optimal)
        CHECK(std::fabs(sx.objective() - fresh.objective) <=
              1e-7 * (1.0 + std::fabs(fresh.objective)));
    }
  }
}

TEST_CASE("degenerate stacked rows still terminate") {
  // many identical binding rows force degenerate pivots
  LinearProgram lp;
  int n = 6;
  lp.obj.assign(static_cast<size_t>(n), -1.0);
  lp.lo.assign(static_cast<size_t>(n), 0.0);
  lp.hi.assign(static_cast<size_t>(n), 10.0);
  for (int i = 0; i < 12; ++i) {
    LpRow r;
    for (int j = 0; j < n; ++j) r.terms.push_back({j, 1.0});
    r.sense = RowSense::LE;
    r.rhs = 3.0;
    lp.rows.push_back(r);
  }
  LpSolution s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective == doctest::Approx(-3.0).epsilon(1e-9));
}
