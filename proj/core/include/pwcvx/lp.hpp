#pragma once

#include <vector>

namespace pwcvx {

/// One coefficient of a linear expression.
struct LinTerm {
  int var = -1;
  double coeff = 0;
};

enum class RowSense { LE, GE, EQ };

struct LpRow {
  std::vector<LinTerm> terms;
  RowSense sense = RowSense::LE;
  double rhs = 0;
};

/// min obj . x  s.t. rows, lo <= x <= hi.
/// Every structural bound must be finite; the solver relies on that to
/// rule out unbounded rays without extra bookkeeping.
struct LinearProgram {
  std::vector<double> obj;
  std::vector<double> lo, hi;
  std::vector<LpRow> rows;

  int n_cols() const { return static_cast<int>(obj.size()); }
};

enum class LpStatus {
  Optimal,
  Infeasible,
  IterationLimit,
  Numerical,
};

struct LpSolution {
  LpStatus status = LpStatus::Numerical;
  double objective = 0;
  std::vector<double> x;
  long iterations = 0;
};

}  // namespace pwcvx
