#pragma once

#include <string>

#include "pwcvx/lp_file.hpp"
#include "pwcvx/model.hpp"

namespace pwcvx {

/// Shell command template for a solver that consumes an LP file and
/// writes a solution file. "{in}" and "{out}" are replaced with the
/// temporary file paths. Example:
///   pwcvx_cli lpsolve {in} {out} --time-limit 60
struct ExternalSolverConfig {
  std::string command;
  std::string workdir;  // temp files go here; empty means the system temp dir
  bool keep_files = false;
};

struct ExternalResult {
  std::string status;  // optimal | infeasible | time_limit | error
  double objective = 0;
  Assignment point;  // aligned with the model's variables; empty on error
};

/// Round-trip the model through the LP file format and the external
/// command. Unknown names in the solution file are ignored; variables
/// the solver leaves out stay at zero.
ExternalResult solve_with_external(const Model& m,
                                   const ExternalSolverConfig& cfg);

}  // namespace pwcvx
