#pragma once

#include <string>
#include <vector>

namespace pwcvx {

// ---------------------------------------------------------------------------
// Self-contained release checks. Each criterion builds everything it
// needs from fixed seeds, measures itself, and reports one verdict; the
// library never prints, callers decide how to show the results. The
// checks with a stated runtime budget fail when they exceed it.
// ---------------------------------------------------------------------------

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;   // key numbers behind the verdict
  double seconds = 0;
};

/// Number of defined criteria; valid ids are 1..criterion_count().
int criterion_count();

/// Name only, without running anything.
std::string criterion_name(int id);

/// Run one criterion. Throws std::invalid_argument for an unknown id;
/// any other exception escaping the check is a failure of the check
/// itself and is caught by run_acceptance.
CriterionResult run_criterion(int id);

/// Run all criteria, or only the listed ids. Exceptions become failed
/// results, so the returned vector always has one entry per requested
/// criterion, in ascending id order.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& only = {});

}  // namespace pwcvx
