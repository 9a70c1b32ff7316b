#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pwcvx/model.hpp"

namespace pwcvx {

// ---------------------------------------------------------------------------
// CPLEX-style LP text with structured comment lines. The plain sections
// (Minimize, Subject To, Bounds, Binaries) carry the linear shell; the
// "\ MODEL", "\ PTERM" and "\ BLOCK" comments carry what that format
// cannot express (epigraph links, segment metadata), so read_lp
// reconstructs the full model. Numbers are written with 17 significant
// digits and round-trip exactly.
// ---------------------------------------------------------------------------

std::string write_lp_string(const Model& m);
void write_lp(const Model& m, const std::string& path);

Model read_lp_string(const std::string& text);
Model read_lp(const std::string& path);

/// Solution file: "status <word>", "objective <value>", then one
/// "<name> <value>" line per variable.
struct LpFileSolution {
  std::string status;  // optimal | infeasible | time_limit | error
  double objective = 0;
  std::vector<std::pair<std::string, double>> values;
};

void write_solution(const LpFileSolution& sol, const std::string& path);
LpFileSolution read_solution(const std::string& path);

}  // namespace pwcvx
