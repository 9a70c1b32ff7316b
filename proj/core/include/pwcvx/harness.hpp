#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pwcvx/oracles.hpp"
#include "pwcvx/problems.hpp"
#include "pwcvx/solver.hpp"

namespace pwcvx {

// ---------------------------------------------------------------------------
// Experiment driver: run a set of instances through a set of
// formulation variants and tabulate bounds and gaps. Gaps are measured
// against the best incumbent any variant found on that instance, so the
// formulations are compared against a common reference.
// ---------------------------------------------------------------------------

struct ExperimentCombo {
  FormulationKind kind = FormulationKind::IM;
  bool strengthened = true;
};

struct ExperimentSpec {
  std::vector<ProblemInstance> instances;
  std::vector<ExperimentCombo> combos;  // empty: im, im plain, mcm, ccm
  SolveConfig config;
  bool use_repair_hook = true;  // feed repaired points back as incumbents
};

struct TableRow {
  std::string family;  // nck-logistic | nck-trig | ufl
  std::string size;    // "n" or "KxT"
  int type = 0;        // congestion profile for ufl, 0 otherwise
  std::uint64_t seed = 0;
  std::string formulation;  // im | mcm | ccm
  bool strengthened = true;
  std::string status;
  double root_bound = 0;
  double final_bound = 0;
  double incumbent = 0;      // this run's own incumbent (nan when none)
  double root_gap_pct = 0;   // vs the instance's best incumbent
  double final_gap_pct = 0;  // vs the instance's best incumbent
  int root_cuts = 0;
  int total_cuts = 0;
  long nodes = 0;
  double root_time_s = 0;
  double total_time_s = 0;
  /// Solved to optimality yet disagreeing with the best incumbent another
  /// formulation found on the same instance beyond 1e-5 relative.
  bool flagged = false;
};

std::vector<TableRow> run_experiment(const ExperimentSpec& spec);

std::string rows_to_csv(const std::vector<TableRow>& rows);
void write_csv(const std::vector<TableRow>& rows, const std::string& path);

// ---------------------------------------------------------------------------
// Paper-table-shaped aggregation: one row per (family, size, type) with
// one averaged cell per formulation variant. Re-averaging the per-run
// rows reproduces these numbers exactly; nothing else goes into them.
// ---------------------------------------------------------------------------

struct AggregateCell {
  std::string formulation;  // im | mcm | ccm, "-plain" when unstrengthened
  int solved = 0;           // runs that reached optimality
  double mean_root_gap_pct = 0;
  double mean_final_gap_pct = 0;
  double mean_time_s = 0;
  double mean_root_cuts = 0;
  double mean_nodes = 0;
};

struct AggregateRow {
  std::string family;
  std::string size;
  int type = 0;
  int instances = 0;
  std::vector<AggregateCell> cells;  // first-appearance order
};

std::vector<AggregateRow> aggregate_rows(const std::vector<TableRow>& rows);
std::string aggregate_to_csv(const std::vector<AggregateRow>& rows);

// ---------------------------------------------------------------------------
// Deterministic SVG line plot: same inputs, byte-identical output.
// Non-finite samples break the line.
// ---------------------------------------------------------------------------

struct PlotSeries {
  std::string label;
  std::vector<double> ys;
  bool dashed = false;  // dotted stroke instead of solid
  bool fill = false;    // shade the region above the curve (its epigraph)
};

std::string plot_profiles(const std::vector<double>& xs,
                          const std::vector<PlotSeries>& series,
                          const std::string& title,
                          const std::string& xlabel = "x",
                          const std::string& ylabel = "value");

/// The standard four-curve picture for one function: the original g
/// dotted, the piecewise-convex relaxation solid with a shaded
/// epigraph, and the incremental and multiple-choice relaxation value
/// profiles on top. `opts.kind` is ignored; both profiles are drawn.
std::string plot_relaxation_figure(const UnivariateFunction& g, double lo,
                                   double hi, int points,
                                   const std::string& title,
                                   const ProfileOptions& opts = {});

}  // namespace pwcvx
