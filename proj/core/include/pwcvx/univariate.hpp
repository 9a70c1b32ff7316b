#pragma once

#include <string>
#include <variant>
#include <vector>

namespace pwcvx {

// ---------------------------------------------------------------------------
// Closed-form univariate function terms.
//
// Every term evaluates its value and first two derivatives exactly (no
// finite differences), and the family is closed under negation and
// summation, which is what the relaxation machinery needs: constraints
// carry functions with either sign, and curvature analysis needs g''.
// ---------------------------------------------------------------------------

/// amplitude * sin(omega * x + phase)
struct SineTerm {
  double amplitude = 0, omega = 0, phase = 0;
};

/// amplitude * cos(omega * x + phase)
struct CosineTerm {
  double amplitude = 0, omega = 0, phase = 0;
};

/// c / (1 + b * exp(-a * (x + d)))
struct LogisticTerm {
  double a = 0, b = 0, c = 0, d = 0;
};

/// coeffs[0] + coeffs[1] * x + coeffs[2] * x^2 + ...
struct PolynomialTerm {
  std::vector<double> coeffs;
};

/// a * (sin(b * x) + c * x)^2
struct SquaredCompositeTerm {
  double a = 0, b = 0, c = 0;
};

using FunctionTerm = std::variant<SineTerm, CosineTerm, LogisticTerm,
                                  PolynomialTerm, SquaredCompositeTerm>;

double term_eval(const FunctionTerm& t, double x);
double term_deriv(const FunctionTerm& t, double x);
double term_deriv2(const FunctionTerm& t, double x);
FunctionTerm term_negated(const FunctionTerm& t);

/// A sum of closed-form terms.
struct UnivariateFunction {
  std::vector<FunctionTerm> terms;

  double eval(double x) const;
  double deriv(double x) const;
  double deriv2(double x) const;
  UnivariateFunction negated() const;
};

/// Serialize as a JSON array of term objects; see README for the schema.
std::string to_json_string(const UnivariateFunction& f);
UnivariateFunction function_from_json(const std::string& text);

// ---------------------------------------------------------------------------
// Curvature-sign decomposition.
// ---------------------------------------------------------------------------

struct Segment {
  double lo = 0, hi = 0;
  bool convex = false;   // sign of g'' on the open interval
  double secant_slope = 0;  // (g(hi) - g(lo)) / (hi - lo)
};

struct Decomposition {
  double lo = 0, hi = 0;
  std::vector<Segment> segments;
  /// Set when g'' stayed inside the zero band on the whole domain; the
  /// function is then kept as a single segment treated as convex.
  bool near_linear = false;
};

struct BreakpointOptions {
  int grid_n = 512;          // curvature scan intervals
  double root_tol = 1e-10;   // bisection width for each inflection point
  double zero_tol = 1e-9;    // |g''| below this counts as zero curvature
  double min_seg_len = 1e-8; // shorter segments are merged into a neighbor
};

/// Locate the inflection points of f on [lo, hi] and return the maximal
/// segments of constant curvature sign. Output segments alternate
/// convexity. An inflection landing exactly on a scan grid point is
/// resolved by bracketing against the flanking cells, so it is reported
/// once, not twice.
Decomposition find_breakpoints(const UnivariateFunction& f, double lo,
                               double hi,
                               const BreakpointOptions& opts = {});

/// Piecewise-convex relaxation value: f(x) on convex segments, the
/// segment secant on concave ones. x is clamped into the domain.
double relaxed_eval(const UnivariateFunction& f, const Decomposition& d,
                    double x);

/// Index of the segment containing x (ties at shared endpoints go to the
/// left segment, except at the domain start).
int segment_index(const Decomposition& d, double x);

}  // namespace pwcvx
