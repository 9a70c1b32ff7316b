#pragma once

#include <vector>

#include "pwcvx/lp.hpp"

namespace pwcvx {

struct SimplexControls {
  double feas_tol = 1e-9;    // bound violation treated as feasible
  double dual_tol = 1e-9;    // reduced cost below this is not attractive
  double pivot_tol = 1e-12;  // ratio-test zero: smaller column entries are noise
  long max_iters = 2000000;
  int refactor_every = 128;  // eta vectors kept before a fresh LU
  int bland_trigger = 120;   // consecutive degenerate pivots before Bland
};

/// Bounded-variable primal revised simplex over a dense LU of the basis
/// with product-form eta updates.
///
/// The engine is built once per model and then mutated in place: the
/// branch-and-cut driver changes column bounds between nodes and appends
/// cut rows as they are separated, re-solving each time from the current
/// basis. Rows are scaled to unit max-abs coefficient on entry. Phase 1
/// prices a composite of infeasibility reduction and the true objective,
/// and a stretch of degenerate pivots switches pricing to Bland's rule
/// until progress resumes.
class Simplex {
 public:
  explicit Simplex(const LinearProgram& lp, const SimplexControls& c = {});

  /// Solve from the current basis and bounds. Never throws on numerical
  /// trouble; inspect the returned status.
  LpStatus solve();

  /// Append rows (their slacks enter the basis). Cheap when no eta
  /// vectors are pending: the factor is extended by one triangular solve
  /// per row instead of being rebuilt.
  void add_rows(const std::vector<LpRow>& rows);

  void set_col_bounds(int j, double lo, double hi);
  double col_lo(int j) const { return lo_[static_cast<std::size_t>(j)]; }
  double col_hi(int j) const { return hi_[static_cast<std::size_t>(j)]; }

  double objective() const;
  /// Structural variable values after a solve.
  std::vector<double> solution() const;
  double value(int j) const { return xval_[static_cast<std::size_t>(j)]; }

  long iterations() const { return iters_; }
  int n_rows() const { return static_cast<int>(b_.size()); }
  int n_structural() const { return nstruct_; }

 private:
  enum Status : unsigned char { AtLower, AtUpper, Basic };

  // columns: 0..nstruct_-1 structural, then one slack per row
  int nstruct_ = 0;
  std::vector<std::vector<LinTerm>> cols_;  // scaled coefficients by column
  std::vector<double> obj_, lo_, hi_, xval_;
  std::vector<unsigned char> stat_;
  std::vector<double> b_;        // scaled rhs
  std::vector<double> rowscale_;
  std::vector<int> basic_;       // var index per basis position
  std::vector<int> pos_in_basis_;

  // dense LU of the basis (row-major), getrf-style row pivoting
  std::vector<double> lu_;
  std::vector<int> ipiv_;
  bool factor_ok_ = false;

  struct Eta {
    int r;
    std::vector<double> w;
  };
  std::vector<Eta> etas_;

  SimplexControls ctl_;
  long iters_ = 0;
  int degen_run_ = 0;
  bool bland_ = false;

  void append_row(const LpRow& row);
  bool refactor();
  void extend_factor_with_slack_row(const std::vector<double>& arow);
  void ftran(std::vector<double>& v) const;
  void btran(std::vector<double>& v) const;
  void compute_basic_values();
  double infeasibility() const;
  double max_residual() const;
  void scatter_column(int j, std::vector<double>& dense) const;
  LpStatus iterate(bool phase1);
  int price(const std::vector<double>& y, bool phase1,
            const std::vector<double>& pcost, double* best_rc) const;
  double reduced_cost(int j, const std::vector<double>& y,
                      const std::vector<double>& pcost) const;
};

/// One-shot convenience wrapper.
LpSolution solve_lp(const LinearProgram& lp, const SimplexControls& c = {});

}  // namespace pwcvx
