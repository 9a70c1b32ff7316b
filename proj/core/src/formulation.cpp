#include "pwcvx/formulation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pwcvx {

namespace {

int add_var(Model& m, double lo, double hi, VarKind k, double obj,
            std::string name) {
  m.vars.push_back({lo, hi, k});
  m.obj.push_back(obj);
  m.names.push_back(std::move(name));
  return m.n_vars() - 1;
}

std::string seg_name(const char* prefix, int i, int j, int s) {
  return std::string(prefix) + std::to_string(i) + "_" + std::to_string(j) +
         "_" + std::to_string(s);
}

// Bounds for an epigraph variable z >= [g(q) - g(anchor)] y, q in
// [qlo, qhi], y in [0, 1]. The lower bound chases the convex minimum by
// ternary search; both ends get slack so they never bind at optimality
// (the cuts do).
std::pair<double, double> epi_bounds(const UnivariateFunction& g, double anchor,
                                     double qlo, double qhi) {
  double ga = g.eval(anchor);
  double a = qlo, b = qhi;
  for (int it = 0; it < 120 && b - a > 1e-13; ++it) {
    double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
    if (g.eval(m1) < g.eval(m2))
      b = m2;
    else
      a = m1;
  }
  double gmin = g.eval(0.5 * (a + b)) - ga;
  double gmax = std::max(g.eval(qlo), g.eval(qhi)) - ga;
  double zlo = std::min(0.0, gmin);
  zlo -= 1e-7 * (1.0 + std::fabs(zlo));
  double zhi = std::max(0.0, gmax);
  zhi += 1.0 + 1e-6 * (1.0 + std::fabs(zhi));
  return {zlo, zhi};
}

void start_model(Model& m, const SeparableProblem& p, FormulationKind kind,
                 bool strengthened) {
  m.kind = kind;
  m.strengthened = strengthened;
  m.n_original = p.n_vars();
  for (int j = 0; j < p.n_vars(); ++j) {
    auto ju = static_cast<std::size_t>(j);
    bool bin = std::find(p.binary.begin(), p.binary.end(), j) != p.binary.end();
    add_var(m, p.lo[ju], p.hi[ju], bin ? VarKind::Binary : VarKind::Continuous,
            p.obj[ju], "x" + std::to_string(j));
  }
}

const Decomposition& need_decomp(const NonlinearTerm& t) {
  if (t.decomp.segments.empty())
    throw std::logic_error("nonlinear term has no decomposition; call "
                           "decompose_all first");
  return t.decomp;
}

// Zero coefficients appear when a secant slope or a segment endpoint is
// exactly zero. They carry nothing, and the LP text format omits them,
// so models must not hold them either or the round trip would not be
// the identity.
void drop_zero_coeffs(Model& m) {
  for (ModelRow& r : m.rows)
    std::erase_if(r.terms, [](const LinTerm& t) { return t.coeff == 0.0; });
}

}  // namespace

// ---------------------------------------------------------------------------
// Incremental model
// ---------------------------------------------------------------------------

Model build_im(const SeparableProblem& p, const ImOptions& opts) {
  Model m;
  start_model(m, p, FormulationKind::IM, opts.strengthened);
  for (int i = 0; i < static_cast<int>(p.rows.size()); ++i) {
    const ProblemRow& pr = p.rows[static_cast<std::size_t>(i)];
    ModelRow row;
    row.sense = pr.sense;
    row.rhs = pr.rhs;
    row.terms = pr.linear;
    for (const auto& nt : pr.nonlinear) {
      const Decomposition& d = need_decomp(nt);
      int S = static_cast<int>(d.segments.size());
      SegBlock blk;
      blk.row = i;
      blk.var = nt.var;
      blk.segs.resize(static_cast<std::size_t>(S));
      for (int s = 0; s < S; ++s) {
        const Segment& sg = d.segments[static_cast<std::size_t>(s)];
        auto& sv = blk.segs[static_cast<std::size_t>(s)];
        sv.lo = sg.lo;
        sv.hi = sg.hi;
        sv.convex = sg.convex;
        sv.alpha = sg.secant_slope;
        sv.x = add_var(m, 0.0, sg.hi - sg.lo, VarKind::Continuous, 0.0,
                       seg_name("xs", i, nt.var, s));
      }
      for (int s = 0; s < S; ++s) {
        auto& sv = blk.segs[static_cast<std::size_t>(s)];
        double ylo = (s == 0 && opts.fix_first_binary) ? 1.0 : 0.0;
        sv.y = add_var(m, ylo, 1.0, VarKind::Binary, 0.0,
                       seg_name("ys", i, nt.var, s));
      }
      // x_j = l^1 + sum_s x^s
      ModelRow link;
      link.sense = RowSense::EQ;
      link.rhs = d.lo;
      link.terms.push_back({nt.var, 1.0});
      for (int s = 0; s < S; ++s)
        link.terms.push_back({blk.segs[static_cast<std::size_t>(s)].x, -1.0});
      m.rows.push_back(std::move(link));
      // len y^{s+1} <= x^s <= len y^s : active segments fill in order
      for (int s = 0; s < S; ++s) {
        auto& sv = blk.segs[static_cast<std::size_t>(s)];
        double len = sv.hi - sv.lo;
        ModelRow up;
        up.terms = {{sv.x, 1.0}, {sv.y, -len}};
        up.sense = RowSense::LE;
        up.rhs = 0;
        m.rows.push_back(std::move(up));
        if (s + 1 < S) {
          ModelRow dn;
          dn.terms = {{blk.segs[static_cast<std::size_t>(s) + 1].y, len},
                      {sv.x, -1.0}};
          dn.sense = RowSense::LE;
          dn.rhs = 0;
          m.rows.push_back(std::move(dn));
        }
      }
      // constraint-row contribution and epigraph links
      row.rhs -= nt.fn.eval(d.lo);
      for (int s = 0; s < S; ++s) {
        auto& sv = blk.segs[static_cast<std::size_t>(s)];
        if (!sv.convex) {
          row.terms.push_back({sv.x, sv.alpha});
          continue;
        }
        auto [zlo, zhi] = epi_bounds(nt.fn, sv.lo, sv.lo, sv.hi);
        sv.z = add_var(m, zlo, zhi, VarKind::Continuous, 0.0,
                       seg_name("zs", i, nt.var, s));
        row.terms.push_back({sv.z, 1.0});
        PerspectiveTerm t;
        t.g = nt.fn;
        t.anchor = sv.lo;
        t.q_lo = sv.lo;
        t.q_hi = sv.hi;
        t.x = {{sv.x, 1.0}};
        t.y = sv.y;
        t.z = sv.z;
        t.perspective = opts.strengthened;
        sv.term = static_cast<int>(m.terms.size());
        m.terms.push_back(std::move(t));
      }
      m.blocks.push_back(std::move(blk));
    }
    m.rows.push_back(std::move(row));
  }
  drop_zero_coeffs(m);
  return m;
}

// ---------------------------------------------------------------------------
// Multiple-choice model
// ---------------------------------------------------------------------------

Model build_mcm(const SeparableProblem& p, bool strengthened) {
  Model m;
  start_model(m, p, FormulationKind::MCM, strengthened);
  for (int i = 0; i < static_cast<int>(p.rows.size()); ++i) {
    const ProblemRow& pr = p.rows[static_cast<std::size_t>(i)];
    ModelRow row;
    row.sense = pr.sense;
    row.rhs = pr.rhs;
    row.terms = pr.linear;
    for (const auto& nt : pr.nonlinear) {
      const Decomposition& d = need_decomp(nt);
      int S = static_cast<int>(d.segments.size());
      double g0 = nt.fn.eval(0.0);
      SegBlock blk;
      blk.row = i;
      blk.var = nt.var;
      blk.segs.resize(static_cast<std::size_t>(S));
      for (int s = 0; s < S; ++s) {
        const Segment& sg = d.segments[static_cast<std::size_t>(s)];
        auto& sv = blk.segs[static_cast<std::size_t>(s)];
        sv.lo = sg.lo;
        sv.hi = sg.hi;
        sv.convex = sg.convex;
        sv.alpha = sg.secant_slope;
        sv.x = add_var(m, std::min(0.0, sg.lo), std::max(0.0, sg.hi),
                       VarKind::Continuous, 0.0, seg_name("xs", i, nt.var, s));
      }
      for (int s = 0; s < S; ++s)
        blk.segs[static_cast<std::size_t>(s)].y = add_var(
            m, 0.0, 1.0, VarKind::Binary, 0.0, seg_name("ys", i, nt.var, s));
      // x_j = sum_s x^s ; exactly one segment active
      ModelRow link;
      link.sense = RowSense::EQ;
      link.rhs = 0;
      link.terms.push_back({nt.var, 1.0});
      for (int s = 0; s < S; ++s)
        link.terms.push_back({blk.segs[static_cast<std::size_t>(s)].x, -1.0});
      m.rows.push_back(std::move(link));
      ModelRow choice;
      choice.sense = RowSense::EQ;
      choice.rhs = 1.0;
      for (int s = 0; s < S; ++s)
        choice.terms.push_back({blk.segs[static_cast<std::size_t>(s)].y, 1.0});
      m.rows.push_back(std::move(choice));
      // l^s y^s <= x^s <= l^{s+1} y^s
      for (int s = 0; s < S; ++s) {
        auto& sv = blk.segs[static_cast<std::size_t>(s)];
        ModelRow up;
        up.terms = {{sv.x, 1.0}, {sv.y, -sv.hi}};
        up.sense = RowSense::LE;
        up.rhs = 0;
        m.rows.push_back(std::move(up));
        ModelRow dn;
        dn.terms = {{sv.y, sv.lo}, {sv.x, -1.0}};
        dn.sense = RowSense::LE;
        dn.rhs = 0;
        m.rows.push_back(std::move(dn));
      }
      for (int s = 0; s < S; ++s) {
        auto& sv = blk.segs[static_cast<std::size_t>(s)];
        if (!sv.convex) {
          // value on the secant: alpha x^s + (g(l^s) - alpha l^s) y^s
          row.terms.push_back({sv.x, sv.alpha});
          double yc = nt.fn.eval(sv.lo) - sv.alpha * sv.lo;
          if (yc != 0.0) row.terms.push_back({sv.y, yc});
          continue;
        }
        auto [zlo, zhi] = epi_bounds(nt.fn, 0.0, sv.lo, sv.hi);
        sv.z = add_var(m, zlo, zhi, VarKind::Continuous, 0.0,
                       seg_name("zs", i, nt.var, s));
        row.terms.push_back({sv.z, 1.0});
        if (g0 != 0.0) row.terms.push_back({sv.y, g0});
        PerspectiveTerm t;
        t.g = nt.fn;
        t.anchor = 0.0;
        t.q_lo = sv.lo;
        t.q_hi = sv.hi;
        t.x = {{sv.x, 1.0}};
        t.y = sv.y;
        t.z = sv.z;
        t.perspective = true;
        sv.term = static_cast<int>(m.terms.size());
        m.terms.push_back(std::move(t));
      }
      m.blocks.push_back(std::move(blk));
    }
    m.rows.push_back(std::move(row));
  }
  drop_zero_coeffs(m);
  return m;
}

// ---------------------------------------------------------------------------
// Convex-combination model
// ---------------------------------------------------------------------------

Model build_ccm(const SeparableProblem& p, bool strengthened) {
  Model m;
  start_model(m, p, FormulationKind::CCM, strengthened);
  for (int i = 0; i < static_cast<int>(p.rows.size()); ++i) {
    const ProblemRow& pr = p.rows[static_cast<std::size_t>(i)];
    ModelRow row;
    row.sense = pr.sense;
    row.rhs = pr.rhs;
    row.terms = pr.linear;
    for (const auto& nt : pr.nonlinear) {
      const Decomposition& d = need_decomp(nt);
      int S = static_cast<int>(d.segments.size());
      double g0 = nt.fn.eval(0.0);
      SegBlock blk;
      blk.row = i;
      blk.var = nt.var;
      blk.segs.resize(static_cast<std::size_t>(S));
      for (int s = 0; s < S; ++s) {
        const Segment& sg = d.segments[static_cast<std::size_t>(s)];
        auto& sv = blk.segs[static_cast<std::size_t>(s)];
        sv.lo = sg.lo;
        sv.hi = sg.hi;
        sv.convex = sg.convex;
        sv.alpha = sg.secant_slope;
        sv.mu = add_var(m, 0.0, 1.0, VarKind::Continuous, 0.0,
                        seg_name("mu", i, nt.var, s));
        sv.lam = add_var(m, 0.0, 1.0, VarKind::Continuous, 0.0,
                         seg_name("la", i, nt.var, s));
      }
      for (int s = 0; s < S; ++s)
        blk.segs[static_cast<std::size_t>(s)].y = add_var(
            m, 0.0, 1.0, VarKind::Binary, 0.0, seg_name("ys", i, nt.var, s));
      // x_j = sum_s (l^s mu^s + l^{s+1} lam^s); y^s = mu^s + lam^s
      ModelRow link;
      link.sense = RowSense::EQ;
      link.rhs = 0;
      link.terms.push_back({nt.var, 1.0});
      for (int s = 0; s < S; ++s) {
        auto& sv = blk.segs[static_cast<std::size_t>(s)];
        if (sv.lo != 0.0) link.terms.push_back({sv.mu, -sv.lo});
        if (sv.hi != 0.0) link.terms.push_back({sv.lam, -sv.hi});
      }
      m.rows.push_back(std::move(link));
      for (int s = 0; s < S; ++s) {
        auto& sv = blk.segs[static_cast<std::size_t>(s)];
        ModelRow def;
        def.sense = RowSense::EQ;
        def.rhs = 0;
        def.terms = {{sv.y, 1.0}, {sv.mu, -1.0}, {sv.lam, -1.0}};
        m.rows.push_back(std::move(def));
      }
      ModelRow choice;
      choice.sense = RowSense::EQ;
      choice.rhs = 1.0;
      for (int s = 0; s < S; ++s)
        choice.terms.push_back({blk.segs[static_cast<std::size_t>(s)].y, 1.0});
      m.rows.push_back(std::move(choice));
      for (int s = 0; s < S; ++s) {
        auto& sv = blk.segs[static_cast<std::size_t>(s)];
        if (!sv.convex) {
          // endpoint interpolation of g over the segment
          row.terms.push_back({sv.mu, nt.fn.eval(sv.lo)});
          row.terms.push_back({sv.lam, nt.fn.eval(sv.hi)});
          continue;
        }
        auto [zlo, zhi] = epi_bounds(nt.fn, 0.0, sv.lo, sv.hi);
        sv.z = add_var(m, zlo, zhi, VarKind::Continuous, 0.0,
                       seg_name("zs", i, nt.var, s));
        row.terms.push_back({sv.z, 1.0});
        if (g0 != 0.0) row.terms.push_back({sv.y, g0});
        PerspectiveTerm t;
        t.g = nt.fn;
        t.anchor = 0.0;
        t.q_lo = sv.lo;
        t.q_hi = sv.hi;
        t.x = {{sv.mu, sv.lo}, {sv.lam, sv.hi}};
        t.y = sv.y;
        t.z = sv.z;
        t.perspective = true;
        sv.term = static_cast<int>(m.terms.size());
        m.terms.push_back(std::move(t));
      }
      m.blocks.push_back(std::move(blk));
    }
    m.rows.push_back(std::move(row));
  }
  drop_zero_coeffs(m);
  return m;
}

Model build_model(const SeparableProblem& p, FormulationKind kind,
                  bool strengthened) {
  switch (kind) {
    case FormulationKind::IM:
      return build_im(p, {strengthened, true});
    case FormulationKind::MCM:
      return build_mcm(p, strengthened);
    case FormulationKind::CCM:
      return build_ccm(p, strengthened);
  }
  throw std::logic_error("unknown formulation");
}

// ---------------------------------------------------------------------------
// Point mappings
// ---------------------------------------------------------------------------

Assignment map_im_to_mcm(const Model& im, const Assignment& a,
                         const Model& mcm) {
  if (im.kind != FormulationKind::IM || mcm.kind != FormulationKind::MCM ||
      im.blocks.size() != mcm.blocks.size())
    throw std::invalid_argument("map_im_to_mcm: mismatched models");
  Assignment out(static_cast<std::size_t>(mcm.n_vars()), 0.0);
  for (int j = 0; j < im.n_original; ++j)
    out[static_cast<std::size_t>(j)] = a[static_cast<std::size_t>(j)];
  for (std::size_t bi = 0; bi < im.blocks.size(); ++bi) {
    const SegBlock& ib = im.blocks[bi];
    const SegBlock& mb = mcm.blocks[bi];
    int S = static_cast<int>(ib.segs.size());
    for (int s = 0; s < S; ++s) {
      const auto& is = ib.segs[static_cast<std::size_t>(s)];
      const auto& ms = mb.segs[static_cast<std::size_t>(s)];
      double psi = a[static_cast<std::size_t>(is.y)];
      double psi1 =
          s + 1 < S ? a[static_cast<std::size_t>(
                          ib.segs[static_cast<std::size_t>(s) + 1].y)]
                    : 0.0;
      double phi = a[static_cast<std::size_t>(is.x)];
      double yv = std::max(0.0, psi - psi1);
      double xv = phi + is.lo * psi - is.hi * psi1;
      out[static_cast<std::size_t>(ms.y)] = yv;
      out[static_cast<std::size_t>(ms.x)] = xv;
      if (ms.z >= 0) {
        const PerspectiveTerm& t =
            mcm.terms[static_cast<std::size_t>(ms.term)];
        double zv = 0.0;
        if (yv > 1e-12) {
          double q = std::clamp(xv / yv, t.q_lo, t.q_hi);
          zv = (t.g.eval(q) - t.g.eval(0.0)) * yv;
        }
        out[static_cast<std::size_t>(ms.z)] = zv;
      }
    }
  }
  return out;
}

Assignment map_mcm_to_ccm(const Model& mcm, const Assignment& a,
                          const Model& ccm) {
  if (mcm.kind != FormulationKind::MCM || ccm.kind != FormulationKind::CCM ||
      mcm.blocks.size() != ccm.blocks.size())
    throw std::invalid_argument("map_mcm_to_ccm: mismatched models");
  Assignment out(static_cast<std::size_t>(ccm.n_vars()), 0.0);
  for (int j = 0; j < mcm.n_original; ++j)
    out[static_cast<std::size_t>(j)] = a[static_cast<std::size_t>(j)];
  for (std::size_t bi = 0; bi < mcm.blocks.size(); ++bi) {
    const SegBlock& mb = mcm.blocks[bi];
    const SegBlock& cb = ccm.blocks[bi];
    for (std::size_t s = 0; s < mb.segs.size(); ++s) {
      const auto& ms = mb.segs[s];
      const auto& cs = cb.segs[s];
      double yv = a[static_cast<std::size_t>(ms.y)];
      double xv = a[static_cast<std::size_t>(ms.x)];
      double len = ms.hi - ms.lo;
      double lam = std::max(0.0, (xv - ms.lo * yv) / len);
      double mu = std::max(0.0, yv - lam);
      out[static_cast<std::size_t>(cs.y)] = yv;
      out[static_cast<std::size_t>(cs.mu)] = mu;
      out[static_cast<std::size_t>(cs.lam)] = lam;
      if (cs.z >= 0) out[static_cast<std::size_t>(cs.z)] =
          a[static_cast<std::size_t>(ms.z)];
    }
  }
  return out;
}

Assignment lift_to_model(const Model& m, const std::vector<double>& x) {
  Assignment a(static_cast<std::size_t>(m.n_vars()), 0.0);
  for (int j = 0; j < m.n_original; ++j)
    a[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)];
  for (const auto& blk : m.blocks) {
    double xj = x[static_cast<std::size_t>(blk.var)];
    int S = static_cast<int>(blk.segs.size());
    xj = std::clamp(xj, blk.segs.front().lo, blk.segs.back().hi);
    a[static_cast<std::size_t>(blk.var)] = xj;
    int star = S - 1;
    for (int s = 0; s < S; ++s)
      if (xj <= blk.segs[static_cast<std::size_t>(s)].hi) {
        star = s;
        break;
      }
    for (int s = 0; s <= star; ++s) {
      const auto& sv = blk.segs[static_cast<std::size_t>(s)];
      const UnivariateFunction* g =
          sv.term >= 0 ? &m.terms[static_cast<std::size_t>(sv.term)].g : nullptr;
      double upper = s < star ? sv.hi : xj;
      switch (m.kind) {
        case FormulationKind::IM:
          a[static_cast<std::size_t>(sv.y)] = 1.0;
          a[static_cast<std::size_t>(sv.x)] = upper - sv.lo;
          if (sv.z >= 0)
            a[static_cast<std::size_t>(sv.z)] = g->eval(upper) - g->eval(sv.lo);
          break;
        case FormulationKind::MCM:
          if (s == star) {
            a[static_cast<std::size_t>(sv.y)] = 1.0;
            a[static_cast<std::size_t>(sv.x)] = xj;
            if (sv.z >= 0)
              a[static_cast<std::size_t>(sv.z)] = g->eval(xj) - g->eval(0.0);
          }
          break;
        case FormulationKind::CCM:
          if (s == star) {
            double lam = (xj - sv.lo) / (sv.hi - sv.lo);
            a[static_cast<std::size_t>(sv.y)] = 1.0;
            a[static_cast<std::size_t>(sv.lam)] = lam;
            a[static_cast<std::size_t>(sv.mu)] = 1.0 - lam;
            if (sv.z >= 0)
              a[static_cast<std::size_t>(sv.z)] = g->eval(xj) - g->eval(0.0);
          }
          break;
      }
    }
  }
  return a;
}

}  // namespace pwcvx
