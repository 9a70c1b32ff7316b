#include "pwcvx/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <unordered_map>

#include "pwcvx/formulation.hpp"

namespace pwcvx {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------
// Sampled convex envelope.
// ---------------------------------------------------------------------------

double EnvelopeOracle::eval(double x) const {
  if (xs.empty()) return 0;
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  size_t i = std::upper_bound(xs.begin(), xs.end(), x) - xs.begin();
  double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return ys[i - 1] + t * (ys[i] - ys[i - 1]);
}

EnvelopeOracle convex_envelope(const UnivariateFunction& f, double lo,
                               double hi, int n) {
  if (n < 1) throw std::runtime_error("convex_envelope: need n >= 1");
  EnvelopeOracle h;
  for (int i = 0; i <= n; ++i) {
    double x = i == n ? hi : lo + (hi - lo) * i / n;
    double y = f.eval(x);
    // monotone chain: drop the middle point of any non-convex triple
    while (h.xs.size() >= 2) {
      size_t k = h.xs.size();
      double cr = (h.xs[k - 1] - h.xs[k - 2]) * (y - h.ys[k - 2]) -
                  (h.ys[k - 1] - h.ys[k - 2]) * (x - h.xs[k - 2]);
      if (cr <= 0) {
        h.xs.pop_back();
        h.ys.pop_back();
      } else {
        break;
      }
    }
    h.xs.push_back(x);
    h.ys.push_back(y);
  }
  return h;
}

// ---------------------------------------------------------------------------
// Relaxation profiles.
// ---------------------------------------------------------------------------

double profile_point(const UnivariateFunction& g, double lo, double hi,
                     double xbar, const ProfileOptions& opts) {
  double gmin = g.eval(lo), gmax = gmin;
  for (int i = 1; i <= 1024; ++i) {
    double v = g.eval(lo + (hi - lo) * i / 1024);
    gmin = std::min(gmin, v);
    gmax = std::max(gmax, v);
  }
  double pad = 1.0 + 1e-6 * (std::abs(gmin) + std::abs(gmax));

  SeparableProblem p;
  p.obj = {0.0, 1.0};
  p.lo = {lo, gmin - pad};
  p.hi = {hi, gmax + pad};
  ProblemRow row;
  row.linear.push_back({1, -1.0});
  NonlinearTerm t;
  t.var = 0;
  t.fn = g;
  row.nonlinear.push_back(std::move(t));
  row.sense = RowSense::LE;
  row.rhs = 0;
  p.rows.push_back(std::move(row));
  decompose_all(p);
  // segments come from the full domain; only then is the point pinned
  double xb = std::clamp(xbar, lo, hi);
  p.lo[0] = p.hi[0] = xb;

  Model m = build_model(p, opts.kind, opts.strengthened);
  SolveConfig cfg;
  cfg.cut_eps = opts.cut_eps;
  cfg.initial_cut_k = opts.initial_cut_k;
  cfg.max_root_rounds = opts.max_rounds;
  cfg.time_limit = opts.time_limit;
  RootResult res = solve_root_relaxation(m, cfg);
  if (res.lp_status != LpStatus::Optimal)
    throw std::runtime_error("profile relaxation did not reach optimality");
  return res.bound;
}

std::vector<double> profile_curve(const UnivariateFunction& g, double lo,
                                  double hi, const std::vector<double>& xs,
                                  const ProfileOptions& opts) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(profile_point(g, lo, hi, x, opts));
  return out;
}

// ---------------------------------------------------------------------------
// Grid reference solver.
// ---------------------------------------------------------------------------

namespace {

struct RowView {
  std::vector<LinTerm> lin;              // non-fixed linear terms
  std::vector<const NonlinearTerm*> nl;  // non-fixed nonlinear terms
  RowSense sense = RowSense::LE;
  double rhs = 0;
};

double relaxed_term(const NonlinearTerm& t, double x) {
  return relaxed_eval(t.fn, t.decomp, x);
}

struct EqDep {
  int var = -1;
  size_t row = 0;
  double coeff = 0;
};

struct Component {
  std::vector<int> free_vars;
  std::vector<size_t> dep_idx;  // indices into the dep list, in order
  std::vector<int> epi_vars;
  std::vector<size_t> rows;
  std::vector<int> all_vars;
};

struct Projection {
  size_t row = 0;
  std::vector<std::pair<int, int>> targets;  // (var, free dimension)
};

struct PatternSolver {
  const SeparableProblem& p;
  int grid_n;
  int passes;

  std::vector<double> lo, hi, val;
  std::vector<char> fixed;
  std::vector<RowView> views;
  std::vector<EqDep> deps;
  std::vector<char> is_dep, is_epi;
  std::vector<int> lin_rows, lin_count, nl_count;
  std::vector<double> lin_coeff;
  double err_estimate = 0;

  PatternSolver(const SeparableProblem& prob, std::vector<double> plo,
                std::vector<double> phi, int gn, int np)
      : p(prob), grid_n(gn), passes(np), lo(std::move(plo)),
        hi(std::move(phi)) {}

  bool var_fixed_width(int v) const {
    return hi[v] - lo[v] <= 1e-11 * (1.0 + std::abs(lo[v]));
  }

  // Fold fixed variables into each row's rhs; reject violated constant rows.
  bool rebuild_views() {
    views.clear();
    views.reserve(p.rows.size());
    for (const auto& r : p.rows) {
      RowView rv;
      rv.sense = r.sense;
      rv.rhs = r.rhs;
      for (const auto& t : r.linear) {
        if (t.coeff == 0) continue;
        if (fixed[t.var]) rv.rhs -= t.coeff * val[t.var];
        else rv.lin.push_back(t);
      }
      for (const auto& t : r.nonlinear) {
        if (fixed[t.var]) rv.rhs -= relaxed_term(t, val[t.var]);
        else rv.nl.push_back(&t);
      }
      if (rv.lin.empty() && rv.nl.empty()) {
        double tol = 1e-7 * (1.0 + std::abs(rv.rhs));
        bool ok = rv.sense == RowSense::LE   ? 0.0 <= rv.rhs + tol
                  : rv.sense == RowSense::GE ? 0.0 >= rv.rhs - tol
                                             : std::abs(rv.rhs) <= tol;
        if (!ok) return false;
      }
      views.push_back(std::move(rv));
    }
    return true;
  }

  // Returns false on detected infeasibility.
  bool tighten_bounds() {
    int n = p.n_vars();
    fixed.assign(n, 0);
    val.assign(n, 0.0);
    for (int v = 0; v < n; ++v) {
      if (lo[v] > hi[v] + 1e-9) return false;
      if (var_fixed_width(v)) {
        fixed[v] = 1;
        val[v] = 0.5 * (lo[v] + hi[v]);
      }
    }
    for (int sweep = 0; sweep < 8; ++sweep) {
      if (!rebuild_views()) return false;
      bool changed = false;
      for (const auto& rv : views) {
        if (!rv.nl.empty() || rv.lin.size() != 1) continue;
        int v = rv.lin[0].var;
        double a = rv.lin[0].coeff;
        double limit = rv.rhs / a;
        bool upper = (rv.sense == RowSense::LE) == (a > 0);
        if (rv.sense == RowSense::EQ) {
          if (limit < lo[v] - 1e-7 || limit > hi[v] + 1e-7) return false;
          double c = std::clamp(limit, lo[v], hi[v]);
          if (!var_fixed_width(v) || std::abs(c - lo[v]) > 1e-11) {
            lo[v] = hi[v] = c;
            changed = true;
          }
        } else if (upper) {
          if (limit < hi[v] - 1e-12) hi[v] = limit, changed = true;
        } else {
          if (limit > lo[v] + 1e-12) lo[v] = limit, changed = true;
        }
        if (lo[v] > hi[v] + 1e-7) return false;
        if (lo[v] > hi[v]) lo[v] = hi[v] = 0.5 * (lo[v] + hi[v]);
        if (!fixed[v] && var_fixed_width(v)) {
          fixed[v] = 1;
          val[v] = 0.5 * (lo[v] + hi[v]);
          changed = true;
        }
      }
      if (!changed) break;
    }
    return rebuild_views();
  }

  void classify() {
    int n = p.n_vars();
    lin_rows.assign(n, -1);
    lin_count.assign(n, 0);
    nl_count.assign(n, 0);
    lin_coeff.assign(n, 0.0);
    for (size_t i = 0; i < views.size(); ++i) {
      for (const auto& t : views[i].lin) {
        lin_count[t.var]++;
        lin_rows[t.var] = static_cast<int>(i);
        lin_coeff[t.var] = t.coeff;
      }
      for (const auto* t : views[i].nl) nl_count[t->var]++;
    }
    is_epi.assign(n, 0);
    for (int v = 0; v < n; ++v) {
      if (fixed[v] || p.obj[v] == 0) continue;
      if (nl_count[v] != 0 || lin_count[v] != 1) continue;
      if (views[lin_rows[v]].sense == RowSense::EQ) continue;
      is_epi[v] = 1;
    }
    // two such variables sharing a row cannot both be eliminated
    for (int v = 0; v < n; ++v) {
      if (!is_epi[v]) continue;
      for (const auto& t : views[lin_rows[v]].lin)
        if (t.var != v && is_epi[t.var]) {
          is_epi[v] = 0;
          break;
        }
    }
    deps.clear();
    is_dep.assign(n, 0);
    for (size_t i = 0; i < views.size(); ++i) {
      const RowView& rv = views[i];
      if (rv.sense != RowSense::EQ) continue;
      int pick = -1;
      double pick_a = 0;
      bool ok = true;
      for (const auto& t : rv.lin) {
        if (is_epi[t.var]) {
          ok = false;  // would reference a value computed later
          break;
        }
        bool in_nl = false;
        for (const auto* nt : rv.nl)
          if (nt->var == t.var) in_nl = true;
        if (is_dep[t.var] || in_nl) continue;
        if (pick == -1 || std::abs(t.coeff) > std::abs(pick_a)) {
          pick = t.var;
          pick_a = t.coeff;
        }
      }
      if (!ok || pick == -1) continue;
      is_dep[pick] = 1;
      deps.push_back({pick, i, pick_a});
    }
  }

  struct Eval {
    double obj = kInf;
    bool feasible = false;
  };

  Eval evaluate(const Component& comp, const std::vector<double>& freev) {
    for (size_t i = 0; i < comp.free_vars.size(); ++i)
      val[comp.free_vars[i]] = freev[i];
    for (size_t di : comp.dep_idx) {
      const EqDep& d = deps[di];
      const RowView& rv = views[d.row];
      double rest = 0;
      for (const auto& t : rv.lin)
        if (t.var != d.var) rest += t.coeff * val[t.var];
      for (const auto* t : rv.nl) rest += relaxed_term(*t, val[t->var]);
      double v = (rv.rhs - rest) / d.coeff;
      double tol = 1e-7 * (1.0 + std::abs(v));
      if (v < lo[d.var] - tol || v > hi[d.var] + tol) return {};
      val[d.var] = std::clamp(v, lo[d.var], hi[d.var]);
    }
    for (int v : comp.epi_vars) {
      const RowView& rv = views[lin_rows[v]];
      double a = lin_coeff[v];
      double rest = 0;
      for (const auto& t : rv.lin)
        if (t.var != v) rest += t.coeff * val[t.var];
      for (const auto* t : rv.nl) rest += relaxed_term(*t, val[t->var]);
      double limit = (rv.rhs - rest) / a;
      bool upper = (rv.sense == RowSense::LE) == (a > 0);
      double x = p.obj[v] > 0 ? (upper ? lo[v] : std::max(lo[v], limit))
                              : (upper ? std::min(hi[v], limit) : hi[v]);
      val[v] = std::clamp(x, lo[v], hi[v]);
    }
    for (size_t ri : comp.rows) {
      const RowView& rv = views[ri];
      double act = 0;
      for (const auto& t : rv.lin) act += t.coeff * val[t.var];
      for (const auto* t : rv.nl) act += relaxed_term(*t, val[t->var]);
      double tol = 1e-7 * (1.0 + std::abs(rv.rhs));
      bool ok = rv.sense == RowSense::LE   ? act <= rv.rhs + tol
                : rv.sense == RowSense::GE ? act >= rv.rhs - tol
                                           : std::abs(act - rv.rhs) <= tol;
      if (!ok) return {};
    }
    double obj = 0;
    for (int v : comp.all_vars) obj += p.obj[v] * val[v];
    return {obj, true};
  }

  std::optional<double> optimize_component(const Component& comp) {
    size_t d = comp.free_vars.size();
    if (d > 3)
      throw std::runtime_error(
          "brute force: component has more than three free dimensions");
    if (d == 0) {
      Eval e = evaluate(comp, {});
      if (!e.feasible) return std::nullopt;
      return e.obj;
    }

    // rows usable as projection targets: purely linear over this
    // component's free variables (everything else already folded away)
    std::vector<Projection> projections;
    for (size_t ri : comp.rows) {
      const RowView& rv = views[ri];
      if (!rv.nl.empty()) continue;
      Projection pr;
      pr.row = ri;
      bool ok = true;
      for (const auto& t : rv.lin) {
        auto it = std::find(comp.free_vars.begin(), comp.free_vars.end(), t.var);
        if (it == comp.free_vars.end()) {
          ok = false;
          break;
        }
        pr.targets.emplace_back(t.var,
                                static_cast<int>(it - comp.free_vars.begin()));
      }
      if (ok && !pr.targets.empty()) projections.push_back(std::move(pr));
    }

    int m = grid_n;
    if (d == 3) m = std::min(m, 256);

    std::vector<double> wlo(d), whi(d);
    for (size_t i = 0; i < d; ++i) {
      wlo[i] = lo[comp.free_vars[i]];
      whi[i] = hi[comp.free_vars[i]];
    }
    std::vector<double> bestv(d, 0.0), h(d, 0.0);
    double bestobj = kInf;
    bool found = false;

    auto consider = [&](const std::vector<double>& pt) {
      Eval e = evaluate(comp, pt);
      if (e.feasible && e.obj < bestobj) {
        bestobj = e.obj;
        bestv = pt;
        found = true;
      }
    };

    std::vector<double> pt(d), pt2(d);
    for (int pass = 0; pass < passes; ++pass) {
      std::vector<int> counts(d);
      for (size_t i = 0; i < d; ++i) {
        double span = whi[i] - wlo[i];
        counts[i] = span > 1e-15 ? m : 0;
        h[i] = counts[i] ? span / counts[i] : 0.0;
      }
      std::vector<int> idx(d, 0);
      while (true) {
        for (size_t i = 0; i < d; ++i)
          pt[i] = idx[i] == counts[i] ? whi[i] : wlo[i] + h[i] * idx[i];
        consider(pt);
        for (const auto& pr : projections) {
          const RowView& rv = views[pr.row];
          double act = 0;
          for (const auto& t : rv.lin) {
            auto tg = std::find_if(pr.targets.begin(), pr.targets.end(),
                                   [&](const auto& q) { return q.first == t.var; });
            act += t.coeff * pt[tg->second];
          }
          for (const auto& [var, dim] : pr.targets) {
            double a = 0;
            for (const auto& t : rv.lin)
              if (t.var == var) a = t.coeff;
            if (a == 0) continue;
            double u = (rv.rhs - (act - a * pt[dim])) / a;
            if (!std::isfinite(u)) continue;
            double lov = lo[var], hiv = hi[var];
            if (u < lov - 1e-9 || u > hiv + 1e-9) continue;
            pt2 = pt;
            pt2[dim] = std::clamp(u, lov, hiv);
            consider(pt2);
          }
        }
        size_t k = 0;
        while (k < d && ++idx[k] > counts[k]) idx[k++] = 0;
        if (k == d) break;
      }
      if (!found) return std::nullopt;
      for (size_t i = 0; i < d; ++i) {
        if (h[i] <= 0) continue;
        double half = 2.0 * h[i];
        wlo[i] = std::max(lo[comp.free_vars[i]], bestv[i] - half);
        whi[i] = std::min(hi[comp.free_vars[i]], bestv[i] + half);
      }
    }
    // leave the winning values in val[], and record a slope estimate
    evaluate(comp, bestv);
    for (size_t i = 0; i < d; ++i) {
      if (h[i] <= 0) continue;
      double worst = 0;
      for (double s : {-1.0, 1.0}) {
        std::vector<double> q = bestv;
        q[i] = std::clamp(q[i] + s * h[i], lo[comp.free_vars[i]],
                          hi[comp.free_vars[i]]);
        Eval e = evaluate(comp, q);
        if (std::isfinite(e.obj)) worst = std::max(worst, std::abs(e.obj - bestobj));
      }
      err_estimate += worst;
    }
    evaluate(comp, bestv);
    return bestobj;
  }

  // Full pattern solve; nullopt when infeasible.
  std::optional<double> run() {
    if (!tighten_bounds()) return std::nullopt;
    classify();
    int n = p.n_vars();

    // components over the non-fixed variables, joined through rows
    std::vector<int> parent(n);
    for (int v = 0; v < n; ++v) parent[v] = v;
    std::function<int(int)> find = [&](int v) {
      while (parent[v] != v) v = parent[v] = parent[parent[v]];
      return v;
    };
    auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
    for (const auto& rv : views) {
      int first = -1;
      auto touch = [&](int v) {
        if (first == -1) first = v;
        else unite(first, v);
      };
      for (const auto& t : rv.lin) touch(t.var);
      for (const auto* t : rv.nl) touch(t->var);
    }

    std::vector<Component> comps;
    std::unordered_map<int, size_t> comp_of_root;
    auto comp_for = [&](int v) -> Component& {
      int r = find(v);
      auto [it, fresh] = comp_of_root.try_emplace(r, comps.size());
      if (fresh) comps.emplace_back();
      return comps[it->second];
    };
    for (int v = 0; v < n; ++v)
      if (!fixed[v] && !is_dep[v] && !is_epi[v]) comp_for(v).free_vars.push_back(v);
    for (size_t i = 0; i < deps.size(); ++i)
      comp_for(deps[i].var).dep_idx.push_back(i);
    for (int v = 0; v < n; ++v)
      if (is_epi[v]) comp_for(v).epi_vars.push_back(v);
    for (size_t i = 0; i < views.size(); ++i) {
      const RowView& rv = views[i];
      int fv = !rv.lin.empty() ? rv.lin[0].var
               : !rv.nl.empty() ? rv.nl[0]->var
                                : -1;
      if (fv != -1) comp_for(fv).rows.push_back(i);
    }
    for (auto& c : comps) {
      c.all_vars = c.free_vars;
      for (size_t di : c.dep_idx) c.all_vars.push_back(deps[di].var);
      for (int v : c.epi_vars) c.all_vars.push_back(v);
    }

    double total = 0;
    for (int v = 0; v < n; ++v)
      if (fixed[v]) total += p.obj[v] * val[v];
    for (const auto& c : comps) {
      auto r = optimize_component(c);
      if (!r) return std::nullopt;
      total += *r;
    }
    if (relaxed_violation(p, val) > 1e-5) return std::nullopt;
    return total;
  }
};

}  // namespace

BruteForceResult brute_force_minlp(const SeparableProblem& p, int grid_n,
                                   int passes) {
  if (grid_n < 4) grid_n = 4;
  if (passes < 1) passes = 1;

  std::vector<int> free_bins;
  for (int b : p.binary)
    if (p.hi[b] - p.lo[b] > 1e-11) free_bins.push_back(b);
  if (free_bins.size() > 12)
    throw std::runtime_error("brute force: too many binary variables");

  BruteForceResult best;
  best.objective = kInf;
  for (unsigned long pat = 0; pat < (1ul << free_bins.size()); ++pat) {
    std::vector<double> lo = p.lo, hi = p.hi;
    for (size_t i = 0; i < free_bins.size(); ++i) {
      double v = (pat >> i) & 1 ? 1.0 : 0.0;
      lo[free_bins[i]] = hi[free_bins[i]] = v;
    }
    PatternSolver ps(p, std::move(lo), std::move(hi), grid_n, passes);
    auto r = ps.run();
    if (r && *r < best.objective) {
      best.objective = *r;
      best.point = ps.val;
      best.feasible = true;
      best.error_estimate = ps.err_estimate;
    }
  }
  if (!best.feasible) best.objective = kInf;
  return best;
}

}  // namespace pwcvx
