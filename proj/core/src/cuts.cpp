#include "pwcvx/cuts.hpp"

#include <algorithm>
#include <cmath>

namespace pwcvx {

Cut make_cut(const PerspectiveTerm& t, int term_index, double q) {
  q = std::clamp(q, t.q_lo, t.q_hi);
  Cut c;
  c.term = term_index;
  c.q = q;
  double gq = t.g.eval(q);
  double gp = t.g.deriv(q);
  double ga = t.g.eval(t.anchor);
  c.ax = gp;
  if (t.perspective) {
    // z >= gp X + [(g(q) - g(anchor)) - gp (q - anchor)] y : tangent of
    // the perspective surface, tight along the ray x = (q - anchor) y
    c.ay = (gq - ga) - gp * (q - t.anchor);
    c.cst = 0;
  } else {
    c.ay = 0;
    c.cst = (gq - ga) - gp * (q - t.anchor);
  }
  return c;
}

double cut_violation(const Cut& c, const PerspectiveTerm& t,
                     const Assignment& a) {
  double X = linear_form_value(t.x, a);
  double lhs = c.ax * X + c.cst;
  if (t.perspective) lhs += c.ay * a[static_cast<std::size_t>(t.y)];
  return lhs - a[static_cast<std::size_t>(t.z)];
}

ModelRow cut_row(const Cut& c, const PerspectiveTerm& t) {
  ModelRow r;
  r.sense = RowSense::LE;
  r.rhs = -c.cst;
  for (const auto& xt : t.x)
    if (c.ax * xt.coeff != 0.0) r.terms.push_back({xt.var, c.ax * xt.coeff});
  if (t.perspective && c.ay != 0.0) r.terms.push_back({t.y, c.ay});
  r.terms.push_back({t.z, -1.0});
  return r;
}

std::vector<Cut> separate(const Model& m, const Assignment& a,
                          const SeparateOptions& opts) {
  std::vector<Cut> out;
  for (int ti = 0; ti < static_cast<int>(m.terms.size()); ++ti) {
    const PerspectiveTerm& t = m.terms[static_cast<std::size_t>(ti)];
    double X = linear_form_value(t.x, a);
    double q;
    if (!t.perspective) {
      q = t.anchor + X;
    } else {
      double y = a[static_cast<std::size_t>(t.y)];
      if (y <= opts.eps_y) {
        if (std::fabs(X) <= opts.eps_y) continue;  // segment fully off
        q = 0.5 * (t.q_lo + t.q_hi);               // load without indicator
      } else {
        q = t.anchor + X / y;
      }
    }
    Cut c = make_cut(t, ti, q);
    c.violation = cut_violation(c, t, a);
    if (c.violation > opts.eps_cut) out.push_back(c);
  }
  return out;
}

std::vector<Cut> initial_cuts(const Model& m, int k) {
  std::vector<Cut> out;
  if (k < 1) return out;
  for (int ti = 0; ti < static_cast<int>(m.terms.size()); ++ti) {
    const PerspectiveTerm& t = m.terms[static_cast<std::size_t>(ti)];
    for (int i = 0; i < k; ++i) {
      double q = k == 1 ? 0.5 * (t.q_lo + t.q_hi)
                        : t.q_lo + (t.q_hi - t.q_lo) * i / (k - 1);
      out.push_back(make_cut(t, ti, q));
    }
  }
  return out;
}

bool CutPool::insert(const Cut& c) {
  long long key = std::llround(c.q * 1e7);
  return seen_.insert({c.term, key}).second;
}

}  // namespace pwcvx
