#pragma once

#include <string>
#include <vector>

#include "pwcvx/lp.hpp"
#include "pwcvx/univariate.hpp"

namespace pwcvx {

// ---------------------------------------------------------------------------
// Separable problem: linear objective and rows of the form
//   linear part + sum_j g_ij(x_j) <= rhs      (or == with no g terms)
// All variable bounds are finite.
// ---------------------------------------------------------------------------

struct NonlinearTerm {
  int var = -1;
  UnivariateFunction fn;
  Decomposition decomp;  // curvature segments of fn on the var's domain
};

struct ProblemRow {
  std::vector<LinTerm> linear;
  std::vector<NonlinearTerm> nonlinear;
  RowSense sense = RowSense::LE;
  double rhs = 0;
};

struct SeparableProblem {
  std::vector<double> obj;  // minimized
  std::vector<double> lo, hi;
  std::vector<int> binary;  // variable indices restricted to {0,1}
  std::vector<ProblemRow> rows;

  int n_vars() const { return static_cast<int>(obj.size()); }
};

/// Fill every nonlinear term's decomposition (terms that already have
/// segments are left alone).
void decompose_all(SeparableProblem& p, const BreakpointOptions& opts = {});

/// Objective value, and largest constraint/bound violation using the
/// exact nonlinear functions.
double original_objective(const SeparableProblem& p,
                          const std::vector<double>& x);
double original_violation(const SeparableProblem& p,
                          const std::vector<double>& x);
/// Same but with each g replaced by its piecewise-convex relaxation.
double relaxed_violation(const SeparableProblem& p,
                         const std::vector<double>& x);

// ---------------------------------------------------------------------------
// Mixed-integer model shared by the three formulations.
// ---------------------------------------------------------------------------

enum class FormulationKind { IM, MCM, CCM };

enum class VarKind : unsigned char { Continuous, Binary };

struct ModelVar {
  double lo = 0, hi = 0;
  VarKind kind = VarKind::Continuous;
};

struct ModelRow {
  std::vector<LinTerm> terms;
  RowSense sense = RowSense::LE;
  double rhs = 0;
};

/// Epigraph link z >= [g(q) - g(anchor)] * y with q = anchor + X/y,
/// where X is the value of the linear form `x`. When `perspective` is
/// false the link is the weaker y-free form z >= g(anchor + X) - g(anchor).
/// q ranges over [q_lo, q_hi]; cuts are generated inside that interval,
/// where g is convex.
struct PerspectiveTerm {
  UnivariateFunction g;
  double anchor = 0;
  double q_lo = 0, q_hi = 0;
  std::vector<LinTerm> x;
  int y = -1;
  int z = -1;
  bool perspective = true;
};

/// Per-segment variable indices of one (row, variable) pair.
/// Unused roles stay -1 (e.g. z on secant segments, mu/lam outside CCM).
struct SegVars {
  double lo = 0, hi = 0;  // segment interval in the original domain
  bool convex = false;
  double alpha = 0;  // secant slope, used by the secant segments
  int x = -1, y = -1, z = -1, mu = -1, lam = -1;
  int term = -1;  // index into Model::terms when convex
};

struct SegBlock {
  int row = -1;  // constraint index in the source problem
  int var = -1;  // original variable
  std::vector<SegVars> segs;
};

struct Model {
  FormulationKind kind = FormulationKind::IM;
  bool strengthened = true;
  int n_original = 0;  // model vars [0, n_original) mirror the problem vars
  std::vector<ModelVar> vars;
  std::vector<std::string> names;
  std::vector<double> obj;
  std::vector<ModelRow> rows;
  std::vector<PerspectiveTerm> terms;
  std::vector<SegBlock> blocks;

  int n_vars() const { return static_cast<int>(vars.size()); }
};

/// Values for every model variable.
using Assignment = std::vector<double>;

double model_objective(const Model& m, const Assignment& a);
double row_activity(const ModelRow& r, const Assignment& a);
double linear_form_value(const std::vector<LinTerm>& f, const Assignment& a);

/// Exact value of the nonlinear side of a term at a point: what z must
/// dominate for the point to satisfy the term, before any cuts.
double exact_term_value(const PerspectiveTerm& t, const Assignment& a,
                        double eps_y = 1e-12);

/// Largest violation over rows, variable bounds and term links.
double model_violation(const Model& m, const Assignment& a);

}  // namespace pwcvx
