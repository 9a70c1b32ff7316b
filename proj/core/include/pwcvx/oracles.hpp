#pragma once

#include <vector>

#include "pwcvx/model.hpp"
#include "pwcvx/solver.hpp"
#include "pwcvx/univariate.hpp"

namespace pwcvx {

// ---------------------------------------------------------------------------
// Independent reference computations used to check the relaxation
// machinery from the outside: a sampled convex envelope, relaxation
// value profiles obtained through the full cut loop, and a grid-based
// global solver for small instances. None of these share code with the
// components they check.
// ---------------------------------------------------------------------------

/// Lower convex envelope of sampled points, kept as its vertices.
struct EnvelopeOracle {
  std::vector<double> xs, ys;  // hull vertices, xs strictly increasing

  /// Piecewise-linear interpolation; x is clamped to the sampled range.
  double eval(double x) const;
};

/// Envelope of f over [lo, hi] from n+1 equidistant samples.
EnvelopeOracle convex_envelope(const UnivariateFunction& f, double lo,
                               double hi, int n);

// ---------------------------------------------------------------------------
// Relaxation profiles: the continuous relaxation value of
//   min t  s.t.  g(x) <= t,  x = xbar
// under a chosen formulation, as a function of xbar. Cuts are driven to
// convergence, so the value is the formulation's exact relaxation of g
// at that point up to the cut tolerance.
// ---------------------------------------------------------------------------

struct ProfileOptions {
  FormulationKind kind = FormulationKind::IM;
  bool strengthened = true;
  double cut_eps = 1e-9;
  int initial_cut_k = 8;
  int max_rounds = 600;
  double time_limit = 120.0;
};

double profile_point(const UnivariateFunction& g, double lo, double hi,
                     double xbar, const ProfileOptions& opts = {});

std::vector<double> profile_curve(const UnivariateFunction& g, double lo,
                                  double hi, const std::vector<double>& xs,
                                  const ProfileOptions& opts = {});

// ---------------------------------------------------------------------------
// Grid-based global minimization of the piecewise-convex problem: the
// binaries are enumerated, structurally determined variables are
// eliminated (single-row objective variables, two-or-more-variable
// equalities), and what remains is searched per independent component
// on a refined grid, with candidates projected onto each purely linear
// row boundary. Components of more than three free dimensions are
// rejected; this is a reference for small instances, not a solver.
// ---------------------------------------------------------------------------

struct BruteForceResult {
  bool feasible = false;
  double objective = 0;
  std::vector<double> point;
  /// Crude sensitivity estimate: final step size times the largest
  /// nearby objective slope per free dimension. Advisory only.
  double error_estimate = 0;
};

BruteForceResult brute_force_minlp(const SeparableProblem& p, int grid_n = 64,
                                   int passes = 3);

}  // namespace pwcvx
