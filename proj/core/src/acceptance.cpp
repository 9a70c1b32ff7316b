#include "pwcvx/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "pwcvx/cuts.hpp"
#include "pwcvx/formulation.hpp"
#include "pwcvx/harness.hpp"
#include "pwcvx/model.hpp"
#include "pwcvx/oracles.hpp"
#include "pwcvx/problems.hpp"
#include "pwcvx/rng.hpp"
#include "pwcvx/solver.hpp"
#include "pwcvx/univariate.hpp"

namespace pwcvx {
namespace {

constexpr double kPi = std::numbers::pi;

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> xs(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i)
    xs[static_cast<std::size_t>(i)] = i == n ? hi : lo + (hi - lo) * i / n;
  return xs;
}

UnivariateFunction sine_fn(double amplitude) {
  UnivariateFunction f;
  f.terms.push_back(SineTerm{amplitude, 1.0, 0.0});
  return f;
}

/// Same parameter ranges as the knapsack generator's logistic family.
UnivariateFunction logistic_draw(Rng& rng) {
  LogisticTerm t;
  t.a = rng.uniform(0.1, 0.2);
  t.b = rng.uniform(0.0, 100.0);
  t.c = rng.uniform(0.0, 100.0);
  t.d = rng.uniform(-100.0, 0.0);
  UnivariateFunction f;
  f.terms.push_back(t);
  return f;
}

UnivariateFunction congestion_fn(int type) {
  UflInstance u = gen_ufl(1, 1, type, 1);
  UnivariateFunction f;
  f.terms.push_back(SquaredCompositeTerm{u.a, u.b, u.c});
  return f;
}

struct DomainFn {
  UnivariateFunction f;
  double lo = 0, hi = 0;
};

/// Cubic with positive leading coefficient on a domain straddling the
/// inflection point: concave then convex, exactly two segments.
DomainFn random_cubic(Rng& rng) {
  double a = rng.uniform(0.2, 1.5);
  double b = rng.uniform(-2.0, 2.0);
  double c = rng.uniform(-3.0, 3.0);
  double d = rng.uniform(-2.0, 2.0);
  UnivariateFunction f;
  f.terms.push_back(PolynomialTerm{{d, c, b, a}});
  double x0 = -b / (3 * a);
  return {f, x0 - rng.uniform(0.7, 2.5), x0 + rng.uniform(0.7, 2.5)};
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0 : s / static_cast<double>(v.size());
}

// ---------------------------------------------------------------------------
// 1. The multiple-choice profile equals the sampled lower convex hull.
// ---------------------------------------------------------------------------

CriterionResult c_envelope() {
  std::vector<DomainFn> cases;
  cases.push_back({sine_fn(-1.0), 0, 2 * kPi});
  cases.push_back({sine_fn(1.0), 0, 2 * kPi});
  Rng rng(101);
  for (int i = 0; i < 3; ++i) cases.push_back({logistic_draw(rng), 0, 100});
  for (int t = 1; t <= 3; ++t) cases.push_back({congestion_fn(t), 0, 1});
  cases.push_back({nck_trig_profile(), 0, 100});

  ProfileOptions po;
  po.kind = FormulationKind::MCM;
  po.cut_eps = 1e-8;
  po.max_rounds = 400;
  double worst = 0;
  for (const DomainFn& cs : cases) {
    EnvelopeOracle env = convex_envelope(cs.f, cs.lo, cs.hi, 65536);
    for (double x : grid(cs.lo, cs.hi, 100))
      worst = std::max(worst, std::abs(profile_point(cs.f, cs.lo, cs.hi, x, po) -
                                       env.eval(x)));
  }
  CriterionResult r;
  r.pass = worst <= 1e-4;
  r.detail = std::to_string(cases.size()) +
             " functions, max abs envelope deviation " + num(worst);
  return r;
}

// ---------------------------------------------------------------------------
// 2. On -sin the multiple-choice profile strictly dominates the
// incremental one, by at least half of the closed-form maximum gap.
// ---------------------------------------------------------------------------

CriterionResult c_separation() {
  UnivariateFunction f = sine_fn(-1.0);
  std::vector<double> xs = grid(0, 2 * kPi, 100);
  ProfileOptions pim, pmc;
  pim.kind = FormulationKind::IM;
  pmc.kind = FormulationKind::MCM;
  std::vector<double> vim = profile_curve(f, 0, 2 * kPi, xs, pim);
  std::vector<double> vmc = profile_curve(f, 0, 2 * kPi, xs, pmc);
  bool ordered = true;
  double observed = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ordered = ordered && vim[i] <= vmc[i] + 1e-7;
    observed = std::max(observed, vmc[i] - vim[i]);
  }

  // Envelope tail in closed form: the tangent from (t, -sin t) with
  // slope -cos t that reaches (2pi, 0); t solves sin t + cos t (2pi - t) = 0.
  double a = kPi / 2, b = kPi;
  for (int i = 0; i < 200; ++i) {
    double m = 0.5 * (a + b);
    (std::sin(m) + std::cos(m) * (2 * kPi - m) > 0 ? a : b) = m;
  }
  double ts = 0.5 * (a + b);
  auto envel = [ts](double x) {
    return x <= ts ? -std::sin(x) : -std::sin(ts) - std::cos(ts) * (x - ts);
  };
  // Incremental value in closed form: the first-segment load ranges
  // over [max(x/2, x - pi), min(pi, x)] and the value is its -sin.
  auto increm = [](double x) {
    if (x <= kPi / 2) return -std::sin(x);
    if (x <= kPi) return -1.0;
    return -std::sin(x / 2);
  };
  double exact = 0;
  for (int i = 0; i <= 200000; ++i) {
    double x = 2 * kPi * i / 200000;
    exact = std::max(exact, envel(x) - increm(x));
  }

  CriterionResult r;
  r.pass = ordered && observed > 0.05 && observed >= 0.5 * exact;
  r.detail = "observed max gap " + num(observed) + ", closed-form max " +
             num(exact) +
             (ordered ? ", profiles ordered" : ", ORDER VIOLATED");
  return r;
}

// ---------------------------------------------------------------------------
// 3. Concave-then-convex two-segment case: the incremental and
// multiple-choice profiles coincide.
// ---------------------------------------------------------------------------

CriterionResult c_two_segment_equality() {
  std::vector<DomainFn> fns;
  fns.push_back({sine_fn(1.0), 0, 2 * kPi});
  Rng rng(303);
  for (int i = 0; i < 20; ++i) fns.push_back(random_cubic(rng));

  ProfileOptions pim, pmc;
  pim.kind = FormulationKind::IM;
  pmc.kind = FormulationKind::MCM;
  double worst = 0;
  for (const DomainFn& df : fns) {
    std::vector<double> xs = grid(df.lo, df.hi, 100);
    std::vector<double> vim = profile_curve(df.f, df.lo, df.hi, xs, pim);
    std::vector<double> vmc = profile_curve(df.f, df.lo, df.hi, xs, pmc);
    for (std::size_t i = 0; i < xs.size(); ++i)
      worst = std::max(worst, std::abs(vim[i] - vmc[i]));
  }
  CriterionResult r;
  r.pass = worst <= 1e-5;
  r.detail = std::to_string(fns.size()) +
             " functions, max profile difference " + num(worst);
  return r;
}

// ---------------------------------------------------------------------------
// 4. Random incremental-feasible points map to multiple-choice-feasible
// points with the same objective.
// ---------------------------------------------------------------------------

CriterionResult c_point_mapping() {
  Rng rng(404);
  double worst_in = 0, worst_out = 0, worst_obj = 0;
  int points = 0;
  for (int k = 0; k < 10; ++k) {
    DomainFn df = random_cubic(rng);
    double gmin = df.f.eval(df.lo), gmax = gmin;
    for (int i = 1; i <= 512; ++i) {
      double v = df.f.eval(df.lo + (df.hi - df.lo) * i / 512);
      gmin = std::min(gmin, v);
      gmax = std::max(gmax, v);
    }
    SeparableProblem p;
    p.obj = {0.0, 1.0};
    // epigraph variable roomy enough for loose samples, not only tight ones
    p.lo = {df.lo, gmin - (gmax - gmin) - 2};
    p.hi = {df.hi, 2 * gmax - gmin + 2};
    ProblemRow row;
    row.linear.push_back({1, -1.0});
    NonlinearTerm nt;
    nt.var = 0;
    nt.fn = df.f;
    row.nonlinear.push_back(std::move(nt));
    row.sense = RowSense::LE;
    row.rhs = 0;
    p.rows.push_back(std::move(row));
    decompose_all(p);

    Model im = build_im(p, {});
    Model mcm = build_mcm(p);
    const SegBlock& blk = im.blocks.front();
    if (blk.segs.size() != 2 || blk.segs[0].convex || !blk.segs[1].convex)
      throw std::runtime_error("sampled cubic is not concave-then-convex");
    const SegVars& s0 = blk.segs[0];
    const SegVars& s1 = blk.segs[1];
    double d0 = s0.hi - s0.lo, d1 = s1.hi - s1.lo;
    const PerspectiveTerm& pt = im.terms[static_cast<std::size_t>(s1.term)];

    for (int t = 0; t < 20; ++t) {
      Assignment av(static_cast<std::size_t>(im.n_vars()), 0.0);
      double y1 = rng.uniform(0.0, 1.0);
      double u0 = rng.uniform(d0 * y1, d0);
      double u1 = rng.uniform(0.0, d1 * y1);
      av[static_cast<std::size_t>(s0.x)] = u0;
      av[static_cast<std::size_t>(s1.x)] = u1;
      av[static_cast<std::size_t>(s0.y)] = 1.0;
      av[static_cast<std::size_t>(s1.y)] = y1;
      av[0] = s0.lo + u0 + u1;
      double zex = exact_term_value(pt, av);
      double zcap = im.vars[static_cast<std::size_t>(pt.z)].hi - zex;
      av[static_cast<std::size_t>(pt.z)] =
          zex + rng.uniform(0.0, std::min(0.3, std::max(0.0, zcap)));
      double treq = s0.alpha * u0 + av[static_cast<std::size_t>(pt.z)] +
                    df.f.eval(s0.lo);
      av[1] = treq + rng.uniform(0.0, 0.2);

      worst_in = std::max(worst_in, model_violation(im, av));
      Assignment bv = map_im_to_mcm(im, av, mcm);
      worst_out = std::max(worst_out, model_violation(mcm, bv));
      worst_obj = std::max(worst_obj,
                           model_objective(mcm, bv) - model_objective(im, av));
      ++points;
    }
  }
  CriterionResult r;
  r.pass = worst_in <= 1e-8 && worst_out <= 1e-8 && worst_obj <= 1e-9;
  r.detail = std::to_string(points) + " points, source violation " +
             num(worst_in) + ", mapped violation " + num(worst_out) +
             ", objective drift " + num(worst_obj);
  return r;
}

// ---------------------------------------------------------------------------
// 5. Multiple-choice and convex-combination root bounds agree.
// ---------------------------------------------------------------------------

std::vector<ProblemInstance> desk_instances_30() {
  std::vector<ProblemInstance> v;
  for (int i = 0; i < 15; ++i)
    v.push_back(gen_nck(3 + i % 6,
                        i % 2 ? NckFamily::Trig : NckFamily::Logistic,
                        5000 + static_cast<std::uint64_t>(i)));
  const int kt[3][2] = {{2, 3}, {3, 3}, {3, 4}};
  for (int i = 0; i < 15; ++i)
    v.push_back(gen_ufl(kt[i % 3][0], kt[i % 3][1], 1 + i % 3,
                        5100 + static_cast<std::uint64_t>(i)));
  return v;
}

CriterionResult c_mcm_ccm_agree() {
  SolveConfig cfg;
  cfg.cut_eps = 1e-8;
  cfg.max_root_rounds = 400;
  double worst = 0;
  int count = 0;
  for (const ProblemInstance& inst : desk_instances_30()) {
    SeparableProblem p = to_separable(inst);
    RootResult rm = solve_root_relaxation(build_mcm(p), cfg);
    RootResult rc = solve_root_relaxation(build_ccm(p), cfg);
    if (rm.lp_status != LpStatus::Optimal || rc.lp_status != LpStatus::Optimal)
      throw std::runtime_error("root relaxation did not reach optimality");
    double scale = 1 + std::max(std::abs(rm.bound), std::abs(rc.bound));
    worst = std::max(worst, std::abs(rm.bound - rc.bound) / scale);
    ++count;
  }
  CriterionResult r;
  r.pass = worst <= 1e-6;
  r.detail = std::to_string(count) + " instances, worst normalized bound gap " +
             num(worst);
  return r;
}

// ---------------------------------------------------------------------------
// 6. The multiple-choice root bound never falls below the incremental one.
// ---------------------------------------------------------------------------

std::vector<ProblemInstance> desk_instances_100() {
  std::vector<ProblemInstance> v;
  for (int i = 0; i < 100; ++i) {
    std::uint64_t seed = 6000 + static_cast<std::uint64_t>(i);
    switch (i % 5) {
      case 0:
        v.push_back(gen_nck(2 + (i / 5) % 5, NckFamily::Logistic, seed));
        break;
      case 1:
        v.push_back(gen_nck(2 + (i / 5) % 4, NckFamily::Trig, seed));
        break;
      case 2:
        v.push_back(gen_ufl(2, 2, 1 + (i / 5) % 3, seed));
        break;
      case 3:
        v.push_back(gen_ufl(2, 3, 1 + (i / 5) % 3, seed));
        break;
      default:
        v.push_back(gen_ufl(2, 2, 1 + (i / 7) % 3, seed));
        break;
    }
  }
  return v;
}

CriterionResult c_bound_dominance() {
  SolveConfig cfg;
  cfg.cut_eps = 1e-11;
  cfg.max_root_rounds = 800;
  cfg.initial_cut_k = 6;
  cfg.simplex.dual_tol = 1e-11;
  double worst = 0;  // most negative (mcm - im); 0 when mcm always above
  int count = 0;
  for (const ProblemInstance& inst : desk_instances_100()) {
    SeparableProblem p = to_separable(inst);
    RootResult ri = solve_root_relaxation(build_im(p, {}), cfg);
    RootResult rm = solve_root_relaxation(build_mcm(p), cfg);
    if (ri.lp_status != LpStatus::Optimal || rm.lp_status != LpStatus::Optimal)
      throw std::runtime_error("root relaxation did not reach optimality");
    worst = std::min(worst, rm.bound - ri.bound);
    ++count;
  }
  CriterionResult r;
  r.pass = worst >= -1e-9;
  r.detail = std::to_string(count) +
             " instances, smallest (multiple-choice - incremental) bound margin " +
             num(worst);
  return r;
}

// ---------------------------------------------------------------------------
// 7. Two-interval knapsack: the two root bounds match per instance.
// ---------------------------------------------------------------------------

CriterionResult c_two_interval_equality() {
  SolveConfig cfg;
  cfg.cut_eps = 1e-8;
  cfg.max_root_rounds = 120;
  cfg.initial_cut_k = 2;
  double worst = 0;
  int count = 0;
  for (int size : {10, 20, 50})
    for (int sd = 0; sd < 10; ++sd) {
      NckInstance inst = gen_nck(
          size, NckFamily::Logistic,
          7000 + static_cast<std::uint64_t>(size) * 10 +
              static_cast<std::uint64_t>(sd));
      SeparableProblem p = to_separable(inst);
      RootResult ri = solve_root_relaxation(build_im(p, {}), cfg);
      RootResult rm = solve_root_relaxation(build_mcm(p), cfg);
      if (ri.lp_status != LpStatus::Optimal ||
          rm.lp_status != LpStatus::Optimal)
        throw std::runtime_error("root relaxation did not reach optimality");
      double scale = 1 + std::max(std::abs(ri.bound), std::abs(rm.bound));
      worst = std::max(worst, std::abs(ri.bound - rm.bound) / scale);
      ++count;
    }
  CriterionResult r;
  r.pass = worst <= 1e-6;
  r.detail = std::to_string(count) + " instances, worst relative bound gap " +
             num(worst);
  return r;
}

// ---------------------------------------------------------------------------
// 8. Four-interval knapsack: mean multiple-choice root gap beats the
// incremental one per size, with matching incumbents where both solved.
// ---------------------------------------------------------------------------

CriterionResult c_four_interval_ordering() {
  bool ordering = true;
  double worst_inc = 0;
  int solved_pairs = 0;
  std::string per_size;
  struct SizeCfg {
    int n;
    double tl;
  };
  for (SizeCfg sc : {SizeCfg{10, 15.0}, SizeCfg{20, 15.0}, SizeCfg{50, 8.0}}) {
    ExperimentSpec spec;
    for (int sd = 0; sd < 10; ++sd)
      spec.instances.push_back(
          gen_nck(sc.n, NckFamily::Trig,
                  8000 + static_cast<std::uint64_t>(sc.n) * 10 +
                      static_cast<std::uint64_t>(sd)));
    spec.combos = {{FormulationKind::IM, true}, {FormulationKind::MCM, true}};
    spec.config.time_limit = sc.tl;
    spec.config.cut_eps = 1e-7;
    spec.config.max_root_rounds = 40;
    spec.config.initial_cut_k = 2;
    std::vector<TableRow> rows = run_experiment(spec);

    std::vector<double> gim, gmc;
    for (const TableRow& row : rows)
      (row.formulation == "im" ? gim : gmc).push_back(row.root_gap_pct);
    double mi = mean(gim), mm = mean(gmc);
    ordering = ordering && mm < mi;
    per_size += (per_size.empty() ? "" : "; ") + std::to_string(sc.n) + ": " +
                num(mi) + "/" + num(mm);

    for (std::size_t k = 0; k + 1 < rows.size(); k += 2) {
      const TableRow& a = rows[k];
      const TableRow& b = rows[k + 1];
      if (a.status != "optimal" || b.status != "optimal") continue;
      ++solved_pairs;
      double scale = 1 + std::max(std::abs(a.incumbent), std::abs(b.incumbent));
      worst_inc = std::max(worst_inc, std::abs(a.incumbent - b.incumbent) / scale);
    }
  }
  CriterionResult r;
  r.pass = ordering && worst_inc <= 1e-5;
  r.detail = "mean root gap% incremental/multiple-choice by size " + per_size +
             "; " + std::to_string(solved_pairs) +
             " solved pairs, worst incumbent difference " + num(worst_inc);
  return r;
}

// ---------------------------------------------------------------------------
// 9. Flow assignment: multiple-choice mean root gap at or below the
// incremental one per (size, type) row; at type 3 at most half of it.
// ---------------------------------------------------------------------------

CriterionResult c_flow_ordering() {
  bool ordering = true, factor = true;
  std::string per_row;
  const int sizes[2][2] = {{3, 6}, {6, 12}};
  for (int si = 0; si < 2; ++si)
    for (int type = 1; type <= 3; ++type) {
      int K = sizes[si][0], T = sizes[si][1];
      ExperimentSpec spec;
      for (int sd = 0; sd < 10; ++sd)
        spec.instances.push_back(
            gen_ufl(K, T, type,
                    9000 + static_cast<std::uint64_t>(K) * 100 +
                        static_cast<std::uint64_t>(type) * 10 +
                        static_cast<std::uint64_t>(sd)));
      spec.combos = {{FormulationKind::IM, true}, {FormulationKind::MCM, true}};
      spec.config.time_limit = si == 0 ? 6.0 : 12.0;
      spec.config.cut_eps = 1e-6;
      spec.config.max_root_rounds = 30;
      spec.config.initial_cut_k = 1;
      spec.config.max_cuts_per_round = 24;
      spec.config.node_sep_rounds = 1;
      spec.config.node_limit = 400;
      spec.config.best_bound = false;
      std::vector<TableRow> rows = run_experiment(spec);

      std::vector<double> gim, gmc;
      for (const TableRow& row : rows)
        (row.formulation == "im" ? gim : gmc).push_back(row.root_gap_pct);
      double mi = mean(gim), mm = mean(gmc);
      ordering = ordering && mm <= mi;
      if (type == 3) factor = factor && mi >= 2 * mm;
      per_row += (per_row.empty() ? "" : "; ") + std::to_string(K) + "x" +
                 std::to_string(T) + " t" + std::to_string(type) + ": " +
                 num(mi) + "/" + num(mm);
    }
  CriterionResult r;
  r.pass = ordering && factor;
  r.detail = "mean root gap% incremental/multiple-choice " + per_row;
  return r;
}

// ---------------------------------------------------------------------------
// 10. Branch-and-cut optimum matches the grid reference on tiny instances.
// ---------------------------------------------------------------------------

CriterionResult c_global_optimum() {
  std::vector<ProblemInstance> v;
  std::uint64_t base = 10000;
  std::uint64_t id = 0;
  for (int n : {1, 2, 3})
    for (int k = 0; k < 2; ++k) {
      v.push_back(gen_nck(n, NckFamily::Logistic, base + id++));
      v.push_back(gen_nck(n, NckFamily::Trig, base + id++));
    }
  v.push_back(gen_nck(2, NckFamily::Logistic, base + 90));
  for (int type = 1; type <= 3; ++type)
    for (int k = 0; k < 4; ++k)
      v.push_back(gen_ufl(2, 3, type, base + 200 + id++));

  SolveConfig cfg;
  cfg.cut_eps = 1e-8;
  cfg.max_root_rounds = 200;
  cfg.initial_cut_k = 4;
  cfg.time_limit = 120;
  double worst = 0;
  int idx = 0;
  for (const ProblemInstance& inst : v) {
    SeparableProblem p = to_separable(inst);
    FormulationKind kind = idx % 3 == 0   ? FormulationKind::IM
                           : idx % 3 == 1 ? FormulationKind::MCM
                                          : FormulationKind::CCM;
    ++idx;
    SolveReport rep = branch_and_cut(build_model(p, kind), cfg);
    BruteForceResult bf = brute_force_minlp(p, 88, 4);
    if (rep.status != SolveStatus::Optimal)
      throw std::runtime_error("search did not finish on a tiny instance");
    if (!bf.feasible)
      throw std::runtime_error("grid reference found no feasible point");
    double scale = 1 + std::abs(bf.objective);
    worst = std::max(worst, std::abs(rep.incumbent_value - bf.objective) / scale);
  }
  CriterionResult r;
  r.pass = worst <= 1e-3;
  r.detail = std::to_string(v.size()) +
             " instances, worst relative optimum difference " + num(worst);
  return r;
}

// ---------------------------------------------------------------------------
// 11. Randomized cut validity across every term family.
// ---------------------------------------------------------------------------

DomainFn random_family_fn(int family, Rng& rng) {
  UnivariateFunction f;
  switch (family) {
    case 0:
    case 1: {
      double amp = (rng.uniform(0.0, 1.0) < 0.5 ? -1 : 1) *
                   rng.uniform(0.5, 3.0);
      double omega = rng.uniform(0.3, 3.0);
      double phase = rng.uniform(-kPi, kPi);
      if (family == 0)
        f.terms.push_back(SineTerm{amp, omega, phase});
      else
        f.terms.push_back(CosineTerm{amp, omega, phase});
      double u = rng.uniform(-5.0, 5.0);
      return {f, u, u + rng.uniform(1.5, 8.0)};
    }
    case 2: {
      f = logistic_draw(rng);
      if (rng.uniform(0.0, 1.0) < 0.5) f = f.negated();
      return {f, 0, 100};
    }
    case 3: {
      DomainFn df = random_cubic(rng);
      if (rng.uniform(0.0, 1.0) < 0.5) df.f = df.f.negated();
      return df;
    }
    default: {
      f.terms.push_back(SquaredCompositeTerm{rng.uniform(5.0, 30.0),
                                             rng.uniform(1.0, 12.0),
                                             rng.uniform(0.5, 6.0)});
      return {f, 0, 1};
    }
  }
}

CriterionResult c_cut_validity() {
  Rng rng(1111);
  double worst = -std::numeric_limits<double>::infinity();
  long total = 0;
  const long per_family = 100000;
  for (int family = 0; family < 5; ++family) {
    long done = 0;
    while (done < per_family) {
      DomainFn df = random_family_fn(family, rng);
      Decomposition d = find_breakpoints(df.f, df.lo, df.hi);
      std::vector<const Segment*> convex;
      for (const Segment& sg : d.segments)
        if (sg.convex && sg.hi - sg.lo > 1e-6) convex.push_back(&sg);
      if (convex.empty()) continue;
      for (int t = 0; t < 500 && done < per_family; ++t, ++done) {
        const Segment& sg = *convex[static_cast<std::size_t>(rng.uniform_int(
            0, static_cast<std::int64_t>(convex.size()) - 1))];
        bool persp = rng.uniform(0.0, 1.0) < 0.5;
        // plain links are only ever anchored at the segment start; the
        // perspective ones also appear anchored at zero
        double anchor =
            persp && rng.uniform(0.0, 1.0) < 0.5 ? 0.0 : sg.lo;
        PerspectiveTerm pt;
        pt.g = df.f;
        pt.anchor = anchor;
        pt.q_lo = sg.lo;
        pt.q_hi = sg.hi;
        pt.x = {{0, 1.0}};
        pt.y = 1;
        pt.z = 2;
        pt.perspective = persp;
        double pick = rng.uniform(0.0, 1.0);
        double q = pick < 0.05   ? sg.lo
                   : pick < 0.10 ? sg.hi
                                 : rng.uniform(sg.lo, sg.hi);
        Cut cut = make_cut(pt, 0, q);
        double at = rng.uniform(sg.lo, sg.hi);
        double y = persp ? (rng.uniform(0.0, 1.0) < 0.1
                                ? 0.0
                                : rng.uniform(1e-6, 1.0))
                         : 1.0;
        Assignment a(3, 0.0);
        a[1] = y;
        if (persp) {
          a[0] = (at - anchor) * y;
          a[2] = y == 0.0 ? 0.0
                          : (df.f.eval(at) - df.f.eval(anchor)) * y;
        } else {
          a[0] = at - anchor;
          a[2] = df.f.eval(at) - df.f.eval(anchor);
        }
        worst = std::max(worst, cut_violation(cut, pt, a));
      }
    }
    total += per_family;
  }
  CriterionResult r;
  r.pass = worst <= 1e-9;
  r.detail = std::to_string(total) + " checks, worst violation " + num(worst);
  return r;
}

// ---------------------------------------------------------------------------
// 12. On a convex-then-concave function the perspective links change
// nothing in the incremental profile: the only convex segment is the
// first, whose indicator is pinned to one.
// ---------------------------------------------------------------------------

CriterionResult c_strengthening_noop() {
  UnivariateFunction f = sine_fn(-1.0);
  std::vector<double> xs = grid(0, 2 * kPi, 100);
  ProfileOptions with, without;
  with.kind = without.kind = FormulationKind::IM;
  without.strengthened = false;
  std::vector<double> va = profile_curve(f, 0, 2 * kPi, xs, with);
  std::vector<double> vb = profile_curve(f, 0, 2 * kPi, xs, without);
  double worst = 0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    worst = std::max(worst, std::abs(va[i] - vb[i]));
  CriterionResult r;
  r.pass = worst <= 1e-6;
  r.detail = "max abs profile difference " + num(worst);
  return r;
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

struct Entry {
  const char* name;
  CriterionResult (*fn)();
  double budget_s;  // 0: no stated budget
};

const Entry kEntries[] = {
    {"envelope agreement", c_envelope, 30},
    {"strict profile separation on a convex-then-concave sine", c_separation,
     10},
    {"two-segment profile equality", c_two_segment_equality, 60},
    {"incremental-to-multiple-choice point mapping", c_point_mapping, 0},
    {"multiple-choice and convex-combination bounds agree", c_mcm_ccm_agree,
     0},
    {"bound dominance", c_bound_dominance, 0},
    {"two-interval knapsack bound equality", c_two_interval_equality, 300},
    {"four-interval knapsack gap ordering", c_four_interval_ordering, 900},
    {"flow assignment gap ordering", c_flow_ordering, 1200},
    {"small-instance global optimum match", c_global_optimum, 0},
    {"cut validity", c_cut_validity, 0},
    {"strengthening no-op on convex-then-concave profiles",
     c_strengthening_noop, 0},
};

constexpr int kCount = static_cast<int>(sizeof(kEntries) / sizeof(kEntries[0]));

double seconds_between(std::chrono::steady_clock::time_point a,
                       std::chrono::steady_clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

}  // namespace

int criterion_count() { return kCount; }

std::string criterion_name(int id) {
  if (id < 1 || id > kCount)
    throw std::invalid_argument("no criterion " + std::to_string(id));
  return kEntries[id - 1].name;
}

CriterionResult run_criterion(int id) {
  if (id < 1 || id > kCount)
    throw std::invalid_argument("no criterion " + std::to_string(id));
  const Entry& e = kEntries[id - 1];
  auto t0 = std::chrono::steady_clock::now();
  CriterionResult r = e.fn();
  r.seconds = seconds_between(t0, std::chrono::steady_clock::now());
  r.id = id;
  r.name = e.name;
  if (e.budget_s > 0 && r.seconds > e.budget_s) {
    r.pass = false;
    r.detail += "; exceeded the " + num(e.budget_s) + " s budget";
  }
  return r;
}

std::vector<CriterionResult> run_acceptance(const std::vector<int>& only) {
  std::vector<int> ids = only;
  if (ids.empty())
    for (int i = 1; i <= kCount; ++i) ids.push_back(i);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  std::vector<CriterionResult> out;
  for (int id : ids) {
    if (id < 1 || id > kCount) {
      CriterionResult r;
      r.id = id;
      r.name = "unknown";
      r.detail = "no such criterion";
      out.push_back(std::move(r));
      continue;
    }
    auto t0 = std::chrono::steady_clock::now();
    try {
      out.push_back(run_criterion(id));
    } catch (const std::exception& ex) {
      CriterionResult r;
      r.id = id;
      r.name = kEntries[id - 1].name;
      r.detail = std::string("exception: ") + ex.what();
      r.seconds = seconds_between(t0, std::chrono::steady_clock::now());
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace pwcvx
