#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "doctest.h"
#include "pwcvx/cuts.hpp"
#include "pwcvx/formulation.hpp"
#include "pwcvx/problems.hpp"
#include "pwcvx/rng.hpp"
#include "pwcvx/solver.hpp"

using namespace pwcvx;

namespace {

const double kPi = 3.14159265358979323846;

UnivariateFunction sine(double amplitude) {
  UnivariateFunction f;
  f.terms.push_back(SineTerm{amplitude, 1.0, 0.0});
  return f;
}

SeparableProblem epigraph_problem(const UnivariateFunction& g, double lo,
                                  double hi) {
  double gmin = g.eval(lo), gmax = gmin;
  for (int i = 1; i <= 512; ++i) {
    double v = g.eval(lo + (hi - lo) * i / 512);
    gmin = std::min(gmin, v);
    gmax = std::max(gmax, v);
  }
  double pad = 1.0 + 1e-3 * (std::fabs(gmin) + std::fabs(gmax));
  SeparableProblem p;
  p.obj = {0.0, 1.0};
  p.lo = {lo, gmin - pad};
  p.hi = {hi, gmax + pad};
  ProblemRow r;
  r.linear = {{1, -1.0}};
  NonlinearTerm nt;
  nt.var = 0;
  nt.fn = g;
  r.nonlinear.push_back(std::move(nt));
  r.sense = RowSense::LE;
  r.rhs = 0.0;
  p.rows.push_back(std::move(r));
  decompose_all(p);
  return p;
}

// standalone three-variable term: var 0 carries the load form, 1 the
// indicator, 2 the epigraph value
PerspectiveTerm standalone_term(const UnivariateFunction& g, double anchor,
                                double q_lo, double q_hi, bool perspective) {
  PerspectiveTerm t;
  t.g = g;
  t.anchor = anchor;
  t.q_lo = q_lo;
  t.q_hi = q_hi;
  t.x = {{0, 1.0}};
  t.y = 1;
  t.z = 2;
  t.perspective = perspective;
  return t;
}

std::vector<std::pair<UnivariateFunction, std::pair<double, double>>>
term_families() {
  std::vector<std::pair<UnivariateFunction, std::pair<double, double>>> out;
  out.push_back({sine(-1.0), {0.0, 2 * kPi}});
  {
    UnivariateFunction f;
    f.terms.push_back(LogisticTerm{0.17, 30.0, 60.0, -40.0});
    out.push_back({f, {0.0, 100.0}});
    out.push_back({f.negated(), {0.0, 100.0}});
  }
  {
    UnivariateFunction f;
    f.terms.push_back(PolynomialTerm{{0.3, -1.0, -0.8, 0.5}});
    out.push_back({f, {-2.0, 3.0}});
  }
  {
    UnivariateFunction f;
    f.terms.push_back(SquaredCompositeTerm{25.0, 10.0, 5.0});
    out.push_back({f, {0.0, 1.0}});
  }
  return out;
}

}  // namespace

TEST_CASE("tangent coefficients at hand-checked points") {
  // convex piece of -sin with the anchor at its left end
  PerspectiveTerm t = standalone_term(sine(-1.0), 0.0, 0.0, kPi, true);
  Cut c = make_cut(t, 0, kPi / 2);
  CHECK(c.ax == doctest::Approx(0.0).epsilon(1e-12));  // slope -cos flips sign
  CHECK(c.ay == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(c.cst == 0.0);

  // at the anchor the indicator coefficient vanishes
  Cut c0 = make_cut(t, 0, 0.0);
  CHECK(c0.ay == doctest::Approx(0.0).epsilon(1e-12));

  // the weak link folds the offset into the constant instead
  PerspectiveTerm w = standalone_term(sine(-1.0), 0.0, 0.0, kPi, false);
  Cut cw = make_cut(w, 0, kPi / 2);
  CHECK(cw.ay == 0.0);
  CHECK(cw.cst == doctest::Approx(-1.0).epsilon(1e-12));

  // generation points outside the ratio interval are clamped
  Cut clo = make_cut(t, 0, -5.0);
  CHECK(clo.q == doctest::Approx(0.0));
  Cut chi = make_cut(t, 0, 50.0);
  CHECK(chi.q == doctest::Approx(kPi).epsilon(1e-12));
}

TEST_CASE("cuts never cut the link surface") {
  Rng rng(2025);
  for (const auto& fam : term_families()) {
    Decomposition d = find_breakpoints(fam.first, fam.second.first,
                                       fam.second.second);
    for (const Segment& sg : d.segments) {
      if (!sg.convex || sg.hi - sg.lo < 1e-6) continue;
      for (int persp = 0; persp < 2; ++persp) {
        // the y-free link is only anchored at the segment start; the
        // perspective link is checked from zero as well
        std::vector<double> anchors = {sg.lo};
        if (persp) anchors.push_back(0.0);
        for (double anchor : anchors) {
          PerspectiveTerm t =
              standalone_term(fam.first, anchor, sg.lo, sg.hi, persp != 0);
          for (int k = 0; k < 2500; ++k) {
            double qg = rng.uniform(sg.lo, sg.hi);
            Cut c = make_cut(t, 0, qg);
            double at = rng.uniform(sg.lo, sg.hi);
            double y = persp ? rng.uniform(1e-6, 1.0) : 1.0;
            if (persp && rng.next_double() < 0.1) y = 0.0;
            Assignment a(3, 0.0);
            a[0] = persp ? (at - anchor) * y : at - anchor;
            a[1] = y;
            a[2] = exact_term_value(t, a);
            if (!std::isfinite(a[2])) continue;
            CHECK(cut_violation(c, t, a) <= 1e-9);
          }
        }
      }
    }
  }
}

TEST_CASE("tangent supremum reproduces the link value") {
  for (const auto& fam : term_families()) {
    Decomposition d = find_breakpoints(fam.first, fam.second.first,
                                       fam.second.second);
    for (const Segment& sg : d.segments) {
      if (!sg.convex || sg.hi - sg.lo < 1e-6) continue;
      PerspectiveTerm t = standalone_term(fam.first, sg.lo, sg.lo, sg.hi, true);
      std::vector<Cut> cuts;
      for (int i = 0; i < 200; ++i)
        cuts.push_back(make_cut(t, 0, sg.lo + (sg.hi - sg.lo) * i / 199.0));
      // quadratic interpolation gap of the tangent grid
      double max_g2 = 0;
      for (int i = 0; i <= 256; ++i)
        max_g2 = std::max(max_g2, std::fabs(fam.first.deriv2(
                                      sg.lo + (sg.hi - sg.lo) * i / 256.0)));
      double step = (sg.hi - sg.lo) / 199.0;
      double tol = step * step * max_g2 + 1e-9;
      for (double y : {0.2, 0.6, 1.0}) {
        for (int i = 0; i <= 40; ++i) {
          double at = sg.lo + (sg.hi - sg.lo) * i / 40.0;
          Assignment a(3, 0.0);
          a[0] = (at - sg.lo) * y;
          a[1] = y;
          a[2] = 0.0;
          double exact = exact_term_value(t, a);
          double best = -1e300;
          for (const Cut& c : cuts)
            best = std::max(best, cut_violation(c, t, a));
          // z = 0, so the violation is the cut value itself
          CHECK(std::fabs(best - exact) <= tol);
        }
      }
    }
  }
}

TEST_CASE("cut rows restate the violation") {
  Rng rng(99);
  PerspectiveTerm t = standalone_term(sine(-1.0), 0.0, 0.0, kPi, true);
  PerspectiveTerm w = standalone_term(sine(-1.0), 0.0, 0.0, kPi, false);
  for (const PerspectiveTerm& term : {t, w}) {
    for (int k = 0; k < 200; ++k) {
      Cut c = make_cut(term, 0, rng.uniform(0.0, kPi));
      Assignment a = {rng.uniform(0.0, kPi), rng.next_double(),
                      rng.uniform(-2.0, 2.0)};
      ModelRow row = cut_row(c, term);
      REQUIRE(row.sense == RowSense::LE);
      CHECK(row_activity(row, a) - row.rhs ==
            doctest::Approx(cut_violation(c, term, a)).epsilon(1e-12));
    }
  }
}

TEST_CASE("separation picks the observed ratio") {
  SeparableProblem p = epigraph_problem(sine(-1.0), 0.0, 2 * kPi);
  Model m = build_mcm(p);
  REQUIRE(m.terms.size() == 1);
  const SegVars& s0 = m.blocks[0].segs[0];
  REQUIRE(s0.convex);

  Assignment a(static_cast<size_t>(m.n_vars()), 0.0);
  a[static_cast<size_t>(s0.y)] = 1.0;
  a[static_cast<size_t>(s0.x)] = kPi / 2;
  a[0] = kPi / 2;
  double exact = exact_term_value(m.terms[0], a);
  a[static_cast<size_t>(s0.z)] = exact - 0.3;
  std::vector<Cut> cuts = separate(m, a, {1e-7, 1e-9});
  REQUIRE(cuts.size() == 1);
  CHECK(cuts[0].q == doctest::Approx(kPi / 2).epsilon(1e-9));
  CHECK(cuts[0].violation == doctest::Approx(0.3).epsilon(1e-9));

  // satisfied link: nothing to add
  a[static_cast<size_t>(s0.z)] = exact + 1e-3;
  CHECK(separate(m, a, {1e-7, 1e-9}).empty());

  // the all-zero point is on the surface
  Assignment zero(static_cast<size_t>(m.n_vars()), 0.0);
  CHECK(separate(m, zero, {1e-7, 1e-9}).empty());

  // vanished indicator with leftover load falls back to the midpoint
  Assignment fb(static_cast<size_t>(m.n_vars()), 0.0);
  fb[static_cast<size_t>(s0.x)] = 0.2;
  fb[static_cast<size_t>(s0.z)] = -5.0;
  std::vector<Cut> fcuts = separate(m, fb, {1e-7, 1e-9});
  REQUIRE(fcuts.size() == 1);
  CHECK(fcuts[0].q == doctest::Approx(kPi / 2).epsilon(1e-9));
}

TEST_CASE("seeded tangents spread evenly over the ratio interval") {
  SeparableProblem p = epigraph_problem(sine(-1.0), 0.0, 2 * kPi);
  Model m = build_mcm(p);
  std::vector<Cut> two = initial_cuts(m, 2);
  REQUIRE(two.size() == 2);
  CHECK(two[0].q == doctest::Approx(0.0));
  CHECK(two[1].q == doctest::Approx(kPi).epsilon(1e-9));
  std::vector<Cut> three = initial_cuts(m, 3);
  REQUIRE(three.size() == 3);
  CHECK(three[1].q == doctest::Approx(kPi / 2).epsilon(1e-9));
}

TEST_CASE("pool rejects repeats") {
  CutPool pool;
  Cut c;
  c.term = 4;
  c.q = 1.0;
  CHECK(pool.insert(c));
  CHECK_FALSE(pool.insert(c));
  c.q = 1.0 + 1e-9;  // same bucket after rounding
  CHECK_FALSE(pool.insert(c));
  c.q = 1.0 + 5e-7;
  CHECK(pool.insert(c));
  c.term = 5;
  CHECK(pool.insert(c));
  CHECK(pool.size() == 3);
}

TEST_CASE("integral lifted points satisfy every seeded cut") {
  Rng rng(31337);
  std::vector<ProblemInstance> instances = {
      gen_nck(1, NckFamily::Trig, 71),
      gen_nck(2, NckFamily::Logistic, 72),
      gen_ufl(2, 2, 3, 73),
  };
  for (const ProblemInstance& inst : instances) {
    SeparableProblem p = to_separable(inst);
    for (FormulationKind kind :
         {FormulationKind::IM, FormulationKind::MCM, FormulationKind::CCM}) {
      Model m = build_model(p, kind);
      std::vector<Cut> cuts = initial_cuts(m, 25);
      for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> x(static_cast<size_t>(p.n_vars()), 0.0);
        if (const auto* nck = std::get_if<NckInstance>(&inst)) {
          for (int j = 0; j < nck->n; ++j)
            x[static_cast<size_t>(j)] = rng.uniform(0.0, 100.0);
          for (int j = 0; j < nck->n; ++j) {
            const NonlinearTerm& t =
                p.rows[static_cast<size_t>(1 + j)].nonlinear[0];
            x[static_cast<size_t>(nck->n + j)] =
                -relaxed_eval(t.fn, t.decomp, x[static_cast<size_t>(j)]);
          }
        } else {
          const auto& u = std::get<UflInstance>(inst);
          int nw = u.K * u.T;
          for (int i = 0; i < nw; ++i)
            x[static_cast<size_t>(i)] = rng.next_double();
          for (int k = 0; k < u.K; ++k) x[static_cast<size_t>(2 * nw + k)] = 1.0;
          int row0 = u.T + nw;
          for (int i = 0; i < nw; ++i) {
            const NonlinearTerm& t =
                p.rows[static_cast<size_t>(row0 + i)].nonlinear[0];
            x[static_cast<size_t>(nw + i)] =
                relaxed_eval(t.fn, t.decomp, x[static_cast<size_t>(i)]);
          }
        }
        Assignment a = lift_to_model(m, x);
        for (const Cut& c : cuts)
          CHECK(cut_violation(c, m.terms[static_cast<size_t>(c.term)], a) <=
                1e-9);
      }
    }
  }
}

TEST_CASE("cut coefficients stay finite across the closed interval") {
  for (const auto& fam : term_families()) {
    Decomposition d = find_breakpoints(fam.first, fam.second.first,
                                       fam.second.second);
    for (const Segment& sg : d.segments) {
      if (!sg.convex) continue;
      for (double anchor : {sg.lo, 0.0}) {
        PerspectiveTerm t =
            standalone_term(fam.first, anchor, sg.lo, sg.hi, true);
        for (int i = 0; i <= 64; ++i) {
          Cut c = make_cut(t, 0, sg.lo + (sg.hi - sg.lo) * i / 64.0);
          CHECK(std::isfinite(c.ax));
          CHECK(std::isfinite(c.ay));
          CHECK(std::isfinite(c.cst));
        }
      }
    }
  }
}

TEST_CASE("cutting planes close onto the convex minimum") {
  // single convex piece: the loop must recover min(-sin) = -1 at pi/2
  SeparableProblem p = epigraph_problem(sine(-1.0), 0.0, kPi);
  SolveConfig cfg;
  cfg.cut_eps = 1e-9;
  cfg.max_root_rounds = 400;
  for (FormulationKind kind :
       {FormulationKind::IM, FormulationKind::MCM, FormulationKind::CCM}) {
    Model m = build_model(p, kind);
    RootResult r = solve_root_relaxation(m, cfg);
    REQUIRE(r.lp_status == LpStatus::Optimal);
    CHECK(r.converged);
    CHECK(r.bound == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(r.rounds >= 1);
  }
}
