#include "pwcvx/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pwcvx {

void decompose_all(SeparableProblem& p, const BreakpointOptions& opts) {
  for (auto& r : p.rows)
    for (auto& t : r.nonlinear)
      if (t.decomp.segments.empty())
        t.decomp = find_breakpoints(t.fn, p.lo[static_cast<std::size_t>(t.var)],
                                    p.hi[static_cast<std::size_t>(t.var)], opts);
}

double original_objective(const SeparableProblem& p,
                          const std::vector<double>& x) {
  double s = 0;
  for (int j = 0; j < p.n_vars(); ++j)
    s += p.obj[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
  return s;
}

namespace {

template <class Eval>
double violation_impl(const SeparableProblem& p, const std::vector<double>& x,
                      Eval eval) {
  double worst = 0;
  for (int j = 0; j < p.n_vars(); ++j) {
    auto ju = static_cast<std::size_t>(j);
    worst = std::max(worst, p.lo[ju] - x[ju]);
    worst = std::max(worst, x[ju] - p.hi[ju]);
  }
  for (const auto& r : p.rows) {
    double act = 0;
    for (const auto& t : r.linear)
      act += t.coeff * x[static_cast<std::size_t>(t.var)];
    for (const auto& t : r.nonlinear)
      act += eval(t, x[static_cast<std::size_t>(t.var)]);
    double v = act - r.rhs;
    if (r.sense == RowSense::EQ)
      worst = std::max(worst, std::fabs(v));
    else if (r.sense == RowSense::GE)
      worst = std::max(worst, -v);
    else
      worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace

double original_violation(const SeparableProblem& p,
                          const std::vector<double>& x) {
  return violation_impl(p, x, [](const NonlinearTerm& t, double v) {
    return t.fn.eval(v);
  });
}

double relaxed_violation(const SeparableProblem& p,
                         const std::vector<double>& x) {
  return violation_impl(p, x, [](const NonlinearTerm& t, double v) {
    return relaxed_eval(t.fn, t.decomp, v);
  });
}

double linear_form_value(const std::vector<LinTerm>& f, const Assignment& a) {
  double s = 0;
  for (const auto& t : f) s += t.coeff * a[static_cast<std::size_t>(t.var)];
  return s;
}

double row_activity(const ModelRow& r, const Assignment& a) {
  return linear_form_value(r.terms, a);
}

double model_objective(const Model& m, const Assignment& a) {
  double s = 0;
  for (int j = 0; j < m.n_vars(); ++j)
    s += m.obj[static_cast<std::size_t>(j)] * a[static_cast<std::size_t>(j)];
  return s;
}

double exact_term_value(const PerspectiveTerm& t, const Assignment& a,
                        double eps_y) {
  double X = linear_form_value(t.x, a);
  double ga = t.g.eval(t.anchor);
  if (!t.perspective) {
    double q = std::clamp(t.anchor + X, t.q_lo, t.q_hi);
    return t.g.eval(q) - ga;
  }
  double y = a[static_cast<std::size_t>(t.y)];
  if (y <= eps_y) {
    if (std::fabs(X) <= 1e-9) return 0.0;
    return std::numeric_limits<double>::infinity();  // unreachable load
  }
  double q = std::clamp(t.anchor + X / y, t.q_lo, t.q_hi);
  return (t.g.eval(q) - ga) * y;
}

double model_violation(const Model& m, const Assignment& a) {
  double worst = 0;
  for (int j = 0; j < m.n_vars(); ++j) {
    auto ju = static_cast<std::size_t>(j);
    worst = std::max(worst, m.vars[ju].lo - a[ju]);
    worst = std::max(worst, a[ju] - m.vars[ju].hi);
  }
  for (const auto& r : m.rows) {
    double v = row_activity(r, a) - r.rhs;
    if (r.sense == RowSense::EQ)
      worst = std::max(worst, std::fabs(v));
    else if (r.sense == RowSense::GE)
      worst = std::max(worst, -v);
    else
      worst = std::max(worst, v);
  }
  for (const auto& t : m.terms) {
    double need = exact_term_value(t, a);
    double have = a[static_cast<std::size_t>(t.z)];
    if (std::isinf(need))
      worst = std::max(worst, 1.0);  // load without an active indicator
    else
      worst = std::max(worst, need - have);
  }
  return worst;
}

}  // namespace pwcvx
