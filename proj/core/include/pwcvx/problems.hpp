#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "pwcvx/model.hpp"
#include "pwcvx/rng.hpp"

namespace pwcvx {

// ---------------------------------------------------------------------------
// Nonlinear continuous knapsack: choose loads x_j in [0, 100] subject to
// sum w_j x_j <= C with C = 50 sum w_j, maximizing sum of profits
// p_j <= g_j(x_j). Internally posed as minimization of -sum p_j.
// ---------------------------------------------------------------------------

enum class NckFamily { Logistic, Trig };

struct NckInstance {
  int n = 0;
  std::uint64_t seed = 0;
  NckFamily family = NckFamily::Logistic;
  std::vector<double> w;
  std::vector<UnivariateFunction> g;
  double capacity() const;
};

/// Draw order: w_0..w_{n-1}, then per item the logistic parameters
/// a, b, c, d (trig profiles draw nothing further).
NckInstance gen_nck(int n, NckFamily family, std::uint64_t seed);

/// The curve used by the trig family:
/// 7.5 sin(pi (x-10)/40) - 15 cos(pi (x-10)/80) + 19.5.
UnivariateFunction nck_trig_profile();

// ---------------------------------------------------------------------------
// Flow assignment with opening costs: serve each consumer t by splitting
// one unit across facilities k (w_kt <= y_k, y_k binary, opening cost
// C_k), paying per-edge congestion s_kt >= a (sin(b w_kt) + c w_kt)^2.
// ---------------------------------------------------------------------------

struct UflInstance {
  int K = 0, T = 0;
  int type = 1;  // 1: (15,2,1)  2: (25,5,5)  3: (25,10,5)
  std::uint64_t seed = 0;
  std::vector<double> open_cost;  // C_0..C_{K-1}, drawn uniformly in [1,100]
  double a = 0, b = 0, c = 0;
};

/// Draw order: C_0..C_{K-1}.
UflInstance gen_ufl(int K, int T, int type, std::uint64_t seed);

using ProblemInstance = std::variant<NckInstance, UflInstance>;

/// Separable form with decompositions attached.
/// NCK variables: x_0..x_{n-1}, p_0..p_{n-1}.
/// UFL variables: w (k major, t minor), then s likewise, then y.
SeparableProblem to_separable(const ProblemInstance& inst,
                              const BreakpointOptions& opts = {});

/// Project a candidate point (original-variable space, any content) onto
/// the feasible set of the instance and return the exact objective of
/// the repaired point, in the minimization orientation of to_separable.
struct RepairResult {
  double objective = 0;
  std::vector<double> point;
};
RepairResult evaluate_and_repair(const ProblemInstance& inst,
                                 const std::vector<double>& x);

/// Objective of the instance at an original-space point (minimization
/// orientation), no feasibility check.
double instance_objective(const ProblemInstance& inst,
                          const std::vector<double>& x);

/// One refinement step: split the concave segment strictly containing
/// x_star into two concave segments with recomputed secants. Convex
/// segments are represented exactly already, so an x_star inside one, at
/// or within 1e-8 of a breakpoint, or outside the domain leaves the
/// decomposition unchanged. The result can contain adjacent segments of
/// equal curvature, which the model builders accept.
Decomposition refine_intervals(const UnivariateFunction& f,
                               const Decomposition& d, double x_star);

/// Instance JSON: parameters and seed; derived data (capacity, the trig
/// curve, type tables) is reconstructed, never stored.
std::string instance_to_json(const ProblemInstance& inst);
ProblemInstance instance_from_json(const std::string& text);
ProblemInstance load_instance(const std::string& path);
void save_instance(const ProblemInstance& inst, const std::string& path);

}  // namespace pwcvx
