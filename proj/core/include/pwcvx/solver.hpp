#pragma once

#include <functional>
#include <optional>

#include "pwcvx/cuts.hpp"
#include "pwcvx/model.hpp"
#include "pwcvx/simplex.hpp"

namespace pwcvx {

/// Optional primal heuristic: receives the original-variable slice of a
/// fractional LP point, returns a candidate point in the original space
/// (it will be lifted to a model assignment and checked before use).
using PrimalHook =
    std::function<std::optional<std::vector<double>>(const std::vector<double>&)>;

struct SolveConfig {
  double feas_tol = 1e-7;
  double int_tol = 1e-6;
  double cut_eps = 1e-6;    // separation violation threshold
  double eps_y = 1e-9;      // indicator considered off below this
  int initial_cut_k = 3;    // seeded tangents per link
  int max_root_rounds = 80;
  int max_cuts_per_round = 0;  // cap on rows added per round; 0 means all
  int node_sep_rounds = 2;
  double time_limit = 10000.0;  // seconds
  long node_limit = 1000000;
  bool best_bound = true;    // false: depth-first
  bool pseudo_cost = false;  // false: most-fractional branching
  double prune_tol = 1e-9;   // relative bound-domination tolerance
  PrimalHook primal_hook;
  SimplexControls simplex;
};

enum class SolveStatus { Optimal, TimeLimit, Infeasible };

const char* to_string(SolveStatus s);

struct RootResult {
  LpStatus lp_status = LpStatus::Numerical;
  double bound = 0;
  Assignment point;
  int cuts = 0;      // separated during the loop (seeded tangents excluded)
  int rounds = 0;
  bool converged = false;  // no violated links remained
  double seconds = 0;
};

struct SolveReport {
  FormulationKind formulation = FormulationKind::IM;
  bool strengthened = true;
  SolveStatus status = SolveStatus::TimeLimit;
  double root_bound = 0;
  double final_bound = 0;
  double incumbent_value = 0;  // quiet NaN when no incumbent was found
  double mip_gap_percent = 0;
  long nodes = 0;
  long simplex_iterations = 0;
  int root_cuts = 0;
  int total_cuts = 0;
  int root_rounds = 0;
  bool root_converged = false;
  double root_seconds = 0;
  double total_seconds = 0;
  Assignment incumbent;  // empty when none
};

/// 100 |incumbent - bound| / (1e-10 + |incumbent|)
double mip_gap_percent(double incumbent, double bound);

LinearProgram model_to_lp(const Model& m);

/// Continuous relaxation bound: relax binaries, then alternate LP solves
/// with link separation until no violated cut remains (or the round cap
/// hits; the bound is valid either way and `converged` says which).
RootResult solve_root_relaxation(const Model& m, const SolveConfig& cfg = {});

/// LP-based branch and cut on the model's binaries. Cuts are globally
/// valid and stay in the LP for every node. Incumbents are accepted only
/// at integral points with no violated link, so their objective is exact.
SolveReport branch_and_cut(const Model& m, const SolveConfig& cfg = {});

}  // namespace pwcvx
