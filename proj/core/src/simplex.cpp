#include "pwcvx/simplex.hpp"
#include <cstdio>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pwcvx {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Simplex::Simplex(const LinearProgram& lp, const SimplexControls& c) : ctl_(c) {
  nstruct_ = lp.n_cols();
  cols_.resize(static_cast<std::size_t>(nstruct_));
  obj_ = lp.obj;
  lo_ = lp.lo;
  hi_ = lp.hi;
  xval_.assign(static_cast<std::size_t>(nstruct_), 0.0);
  stat_.assign(static_cast<std::size_t>(nstruct_), AtLower);
  pos_in_basis_.assign(static_cast<std::size_t>(nstruct_), -1);
  for (int j = 0; j < nstruct_; ++j) {
    auto ju = static_cast<std::size_t>(j);
    if (!std::isfinite(lo_[ju]) || !std::isfinite(hi_[ju]))
      throw std::invalid_argument("structural bounds must be finite");
    if (lo_[ju] > hi_[ju]) throw std::invalid_argument("lo > hi");
    // start at the bound of smaller magnitude; zero-heavy starts keep the
    // initial slack values close to the rhs
    if (std::fabs(hi_[ju]) < std::fabs(lo_[ju])) {
      stat_[ju] = AtUpper;
      xval_[ju] = hi_[ju];
    } else {
      xval_[ju] = lo_[ju];
    }
  }
  for (const auto& r : lp.rows) append_row(r);
  factor_ok_ = false;
}

void Simplex::append_row(const LpRow& row) {
  int i = static_cast<int>(b_.size());
  LpRow r = row;
  if (r.sense == RowSense::GE) {
    for (auto& t : r.terms) t.coeff = -t.coeff;
    r.rhs = -r.rhs;
    r.sense = RowSense::LE;
  }
  double mx = 0;
  for (const auto& t : r.terms) mx = std::max(mx, std::fabs(t.coeff));
  double sc = mx > 0 ? 1.0 / mx : 1.0;
  for (const auto& t : r.terms) {
    if (t.var < 0 || t.var >= nstruct_)
      throw std::invalid_argument("row references unknown column");
    if (t.coeff != 0.0)
      cols_[static_cast<std::size_t>(t.var)].push_back({i, t.coeff * sc});
  }
  b_.push_back(r.rhs * sc);
  rowscale_.push_back(sc);

  // slack column; basic by construction
  cols_.push_back({{i, 1.0}});
  obj_.push_back(0.0);
  if (r.sense == RowSense::EQ) {
    lo_.push_back(0.0);
    hi_.push_back(0.0);
  } else {
    lo_.push_back(0.0);
    hi_.push_back(kInf);
  }
  double act = 0;
  for (const auto& t : r.terms)
    act += t.coeff * sc * xval_[static_cast<std::size_t>(t.var)];
  xval_.push_back(r.rhs * sc - act);
  stat_.push_back(Basic);
  basic_.push_back(static_cast<int>(cols_.size()) - 1);
  pos_in_basis_.push_back(i);
}

void Simplex::scatter_column(int j, std::vector<double>& dense) const {
  std::fill(dense.begin(), dense.end(), 0.0);
  for (const auto& t : cols_[static_cast<std::size_t>(j)])
    dense[static_cast<std::size_t>(t.var)] = t.coeff;
}

// ---------------------------------------------------------------------------
// factorization
// ---------------------------------------------------------------------------

bool Simplex::refactor() {
  int m = n_rows();
  etas_.clear();
  lu_.assign(static_cast<std::size_t>(m) * static_cast<std::size_t>(m), 0.0);
  ipiv_.assign(static_cast<std::size_t>(m), 0);
  for (int k = 0; k < m; ++k)
    for (const auto& t : cols_[static_cast<std::size_t>(basic_[static_cast<std::size_t>(k)])])
      lu_[static_cast<std::size_t>(t.var) * static_cast<std::size_t>(m) +
          static_cast<std::size_t>(k)] = t.coeff;

  auto at = [&](int i, int j) -> double& {
    return lu_[static_cast<std::size_t>(i) * static_cast<std::size_t>(m) +
               static_cast<std::size_t>(j)];
  };
  for (int k = 0; k < m; ++k) {
    int p = k;
    double best = std::fabs(at(k, k));
    for (int i = k + 1; i < m; ++i) {
      double v = std::fabs(at(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best < 1e-13) {
      factor_ok_ = false;
      return false;
    }
    ipiv_[static_cast<std::size_t>(k)] = p;
    if (p != k)
      for (int j = 0; j < m; ++j) std::swap(at(k, j), at(p, j));
    double piv = at(k, k);
    for (int i = k + 1; i < m; ++i) {
      double mlt = at(i, k) / piv;
      at(i, k) = mlt;
      if (mlt != 0.0) {
        double* ri = &at(i, 0);
        const double* rk = &at(k, 0);
        for (int j = k + 1; j < m; ++j) ri[j] -= mlt * rk[j];
      }
    }
  }
  factor_ok_ = true;
  return true;
}

void Simplex::extend_factor_with_slack_row(const std::vector<double>& arow) {
  // Factor holds P B = L U for the old m rows. The new row [a_B^T, 1]
  // with a unit slack column extends it to
  //   [[L,0],[l^T,1]] * [[U,0],[0,1]]  with  l^T U = a_B^T.
  int m = n_rows() - 1;  // old dimension
  int m1 = m + 1;
  std::vector<double> nlu(static_cast<std::size_t>(m1) * static_cast<std::size_t>(m1), 0.0);
  for (int i = 0; i < m; ++i)
    std::copy_n(lu_.begin() + static_cast<std::ptrdiff_t>(i) * m, m,
                nlu.begin() + static_cast<std::ptrdiff_t>(i) * m1);
  std::vector<double> l(static_cast<std::size_t>(m), 0.0);
  for (int k = 0; k < m; ++k) {
    double s = arow[static_cast<std::size_t>(k)];
    for (int i = 0; i < k; ++i)
      s -= l[static_cast<std::size_t>(i)] *
           lu_[static_cast<std::size_t>(i) * static_cast<std::size_t>(m) +
               static_cast<std::size_t>(k)];
    l[static_cast<std::size_t>(k)] =
        s / lu_[static_cast<std::size_t>(k) * static_cast<std::size_t>(m) +
                static_cast<std::size_t>(k)];
  }
  for (int k = 0; k < m; ++k)
    nlu[static_cast<std::size_t>(m) * static_cast<std::size_t>(m1) +
        static_cast<std::size_t>(k)] = l[static_cast<std::size_t>(k)];
  nlu[static_cast<std::size_t>(m) * static_cast<std::size_t>(m1) +
      static_cast<std::size_t>(m)] = 1.0;
  lu_ = std::move(nlu);
  ipiv_.push_back(m);
}

void Simplex::add_rows(const std::vector<LpRow>& rows) {
  for (const auto& row : rows) {
    bool extend = factor_ok_;
    if (extend && !etas_.empty()) {
      if (!refactor()) extend = false;  // rare; falls back to lazy rebuild
      else extend = true;
    }
    std::vector<double> arow;
    if (extend) {
      // coefficients of the new (scaled) row on the current basic columns
      int m = n_rows();
      arow.assign(static_cast<std::size_t>(m), 0.0);
      double mx = 0;
      for (const auto& t : row.terms) mx = std::max(mx, std::fabs(t.coeff));
      double sc = mx > 0 ? 1.0 / mx : 1.0;
      double sgn = row.sense == RowSense::GE ? -1.0 : 1.0;
      for (const auto& t : row.terms) {
        int p = pos_in_basis_[static_cast<std::size_t>(t.var)];
        if (p >= 0) arow[static_cast<std::size_t>(p)] = sgn * t.coeff * sc;
      }
    }
    append_row(row);
    if (extend)
      extend_factor_with_slack_row(arow);
    else
      factor_ok_ = false;
  }
}

void Simplex::set_col_bounds(int j, double lo, double hi) {
  auto ju = static_cast<std::size_t>(j);
  lo_[ju] = lo;
  hi_[ju] = hi;
  if (stat_[ju] == AtLower)
    xval_[ju] = lo;
  else if (stat_[ju] == AtUpper)
    xval_[ju] = hi;
}

void Simplex::ftran(std::vector<double>& v) const {
  int m = n_rows();
  double* vd = v.data();
  for (int k = 0; k < m; ++k) {
    int p = ipiv_[static_cast<std::size_t>(k)];
    if (p != k) std::swap(vd[k], vd[p]);
  }
  // row-oriented substitutions keep the factor accesses contiguous
  for (int i = 1; i < m; ++i) {
    const double* row = &lu_[static_cast<std::size_t>(i) * static_cast<std::size_t>(m)];
    double s = 0;
    for (int k = 0; k < i; ++k) s += row[k] * vd[k];
    vd[i] -= s;
  }
  for (int i = m - 1; i >= 0; --i) {
    const double* row = &lu_[static_cast<std::size_t>(i) * static_cast<std::size_t>(m)];
    double s = vd[i];
    for (int k = i + 1; k < m; ++k) s -= row[k] * vd[k];
    vd[i] = s / row[i];
  }
  for (const auto& e : etas_) {
    double tr = vd[e.r] / e.w[static_cast<std::size_t>(e.r)];
    if (tr != 0.0) {
      const double* w = e.w.data();
      for (int i = 0; i < m; ++i) vd[i] -= w[i] * tr;
    }
    vd[e.r] = tr;
  }
}

void Simplex::btran(std::vector<double>& v) const {
  int m = n_rows();
  double* vd = v.data();
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    const double* w = it->w.data();
    double dot = 0;
    for (int i = 0; i < m; ++i) dot += w[i] * vd[i];
    vd[it->r] = (vd[it->r] + w[it->r] * vd[it->r] - dot) / w[it->r];
  }
  // solve U^T z = v then L^T y = z, saxpy over contiguous factor rows
  for (int k = 0; k < m; ++k) {
    const double* row = &lu_[static_cast<std::size_t>(k) * static_cast<std::size_t>(m)];
    double z = vd[k] / row[k];
    vd[k] = z;
    if (z != 0.0)
      for (int j = k + 1; j < m; ++j) vd[j] -= row[j] * z;
  }
  for (int k = m - 1; k > 0; --k) {
    const double* row = &lu_[static_cast<std::size_t>(k) * static_cast<std::size_t>(m)];
    double t = vd[k];
    if (t != 0.0)
      for (int j = 0; j < k; ++j) vd[j] -= row[j] * t;
  }
  for (int k = m - 1; k >= 0; --k) {
    int p = ipiv_[static_cast<std::size_t>(k)];
    if (p != k) std::swap(vd[k], vd[p]);
  }
}

void Simplex::compute_basic_values() {
  int m = n_rows();
  std::vector<double> rhs = b_;
  int total = static_cast<int>(cols_.size());
  for (int j = 0; j < total; ++j) {
    auto ju = static_cast<std::size_t>(j);
    if (stat_[ju] == Basic || xval_[ju] == 0.0) continue;
    for (const auto& t : cols_[ju])
      rhs[static_cast<std::size_t>(t.var)] -= t.coeff * xval_[ju];
  }
  ftran(rhs);
  for (int k = 0; k < m; ++k)
    xval_[static_cast<std::size_t>(basic_[static_cast<std::size_t>(k)])] =
        rhs[static_cast<std::size_t>(k)];
}

double Simplex::infeasibility() const {
  double s = 0;
  for (int k = 0; k < n_rows(); ++k) {
    auto j = static_cast<std::size_t>(basic_[static_cast<std::size_t>(k)]);
    if (xval_[j] < lo_[j]) s += lo_[j] - xval_[j];
    if (xval_[j] > hi_[j]) s += xval_[j] - hi_[j];
  }
  return s;
}

double Simplex::max_residual() const {
  std::vector<double> r = b_;
  int total = static_cast<int>(cols_.size());
  for (int j = 0; j < total; ++j) {
    auto ju = static_cast<std::size_t>(j);
    if (xval_[ju] == 0.0) continue;
    for (const auto& t : cols_[ju])
      r[static_cast<std::size_t>(t.var)] -= t.coeff * xval_[ju];
  }
  double mx = 0;
  for (double v : r) mx = std::max(mx, std::fabs(v));
  return mx;
}

double Simplex::objective() const {
  double s = 0;
  for (int j = 0; j < nstruct_; ++j)
    s += obj_[static_cast<std::size_t>(j)] * xval_[static_cast<std::size_t>(j)];
  return s;
}

std::vector<double> Simplex::solution() const {
  return std::vector<double>(xval_.begin(), xval_.begin() + nstruct_);
}

double Simplex::reduced_cost(int j, const std::vector<double>& y,
                             const std::vector<double>& pcost) const {
  double rc = pcost[static_cast<std::size_t>(j)];
  for (const auto& t : cols_[static_cast<std::size_t>(j)])
    rc -= t.coeff * y[static_cast<std::size_t>(t.var)];
  return rc;
}

int Simplex::price(const std::vector<double>& y, bool phase1,
                   const std::vector<double>& pcost, double* best_rc) const {
  (void)phase1;
  int total = static_cast<int>(cols_.size());
  int best = -1;
  double best_score = 0;
  for (int j = 0; j < total; ++j) {
    auto ju = static_cast<std::size_t>(j);
    if (stat_[ju] == Basic) continue;
    if (lo_[ju] == hi_[ju]) continue;  // fixed, cannot move
    double rc = reduced_cost(j, y, pcost);
    double score = 0;
    if (stat_[ju] == AtLower && rc < -ctl_.dual_tol)
      score = -rc;
    else if (stat_[ju] == AtUpper && rc > ctl_.dual_tol)
      score = rc;
    else
      continue;
    if (bland_) {
      if (best_rc) *best_rc = rc;
      return j;  // first eligible index
    }
    if (score > best_score) {
      best_score = score;
      best = j;
      if (best_rc) *best_rc = rc;
    }
  }
  return best;
}

LpStatus Simplex::iterate(bool phase1) {
  int m = n_rows();
  int total = static_cast<int>(cols_.size());
  std::vector<double> y(static_cast<std::size_t>(m));
  std::vector<double> w(static_cast<std::size_t>(m));
  std::vector<double> pcost(static_cast<std::size_t>(total), 0.0);

  double omax = 0;
  for (int j = 0; j < nstruct_; ++j)
    omax = std::max(omax, std::fabs(obj_[static_cast<std::size_t>(j)]));
  double omega = phase1 ? 1e-8 / std::max(1.0, omax) : 1.0;

  // phase-1 stall watch: when the infeasibility stops shrinking the
  // objective whiff is the only thing left driving pivots, and it can
  // chase bound flips forever; drop it and pivot by first index instead
  double best_inf = kInf;
  int stall = 0;
  bool pure = false;

  for (;;) {
    if (iters_ >= ctl_.max_iters) return LpStatus::IterationLimit;
    if (iters_ > 0 && iters_ % 100000 == 0) fprintf(stderr, "[trace] iterate phase1=%d iters=%lld infeas=%.3e degen=%d bland=%d\n", (int)phase1, (long long)iters_, infeasibility(), degen_run_, (int)bland_);
    if (static_cast<int>(etas_.size()) >= ctl_.refactor_every) {
      if (!refactor()) { fprintf(stderr, "[trace] N1 periodic refactor failed iters=%lld\n", (long long)iters_); return LpStatus::Numerical; }
      compute_basic_values();
    }

    // composite phase-1 costs: unit penalty toward feasibility plus a
    // whiff of the true objective so ties resolve usefully
    bool any_infeas = false;
    for (int j = 0; j < total; ++j)
      pcost[static_cast<std::size_t>(j)] =
          pure ? 0.0 : omega * obj_[static_cast<std::size_t>(j)];
    if (phase1) {
      double cur_inf = infeasibility();
      if (cur_inf < best_inf - 1e-10) {
        best_inf = cur_inf;
        stall = 0;
      } else if (++stall > 2000) {
        if (pure) return LpStatus::Numerical;  // stuck twice: basis is sick
        pure = true;
        stall = 0;
        if (!refactor()) return LpStatus::Numerical;
        compute_basic_values();
      }
      if (pure) bland_ = true;
    }
    if (phase1) {
      for (int k = 0; k < m; ++k) {
        auto j = static_cast<std::size_t>(basic_[static_cast<std::size_t>(k)]);
        double ftl = ctl_.feas_tol * (1.0 + std::fabs(xval_[j]));
        if (xval_[j] < lo_[j] - ftl) {
          pcost[j] += -1.0;
          any_infeas = true;
        } else if (xval_[j] > hi_[j] + ftl) {
          pcost[j] += 1.0;
          any_infeas = true;
        }
      }
      if (!any_infeas) return LpStatus::Optimal;
    }

    for (int k = 0; k < m; ++k)
      y[static_cast<std::size_t>(k)] =
          pcost[static_cast<std::size_t>(basic_[static_cast<std::size_t>(k)])];
    btran(y);
    int j = price(y, phase1, pcost, nullptr);
    if (j < 0 && phase1) {
      // retry with the pure infeasibility costs: the omega term must not
      // be allowed to mask a feasibility-restoring pivot
      for (int jj = 0; jj < total; ++jj) pcost[static_cast<std::size_t>(jj)] = 0.0;
      for (int k = 0; k < m; ++k) {
        auto jb = static_cast<std::size_t>(basic_[static_cast<std::size_t>(k)]);
        double ftl = ctl_.feas_tol * (1.0 + std::fabs(xval_[jb]));
        if (xval_[jb] < lo_[jb] - ftl)
          pcost[jb] = -1.0;
        else if (xval_[jb] > hi_[jb] + ftl)
          pcost[jb] = 1.0;
      }
      for (int k = 0; k < m; ++k)
        y[static_cast<std::size_t>(k)] =
            pcost[static_cast<std::size_t>(basic_[static_cast<std::size_t>(k)])];
      btran(y);
      j = price(y, phase1, pcost, nullptr);
    }
    if (j < 0) return LpStatus::Optimal;

    auto ju = static_cast<std::size_t>(j);
    double dir = stat_[ju] == AtLower ? 1.0 : -1.0;
    scatter_column(j, w);
    ftran(w);

    // ratio test, two passes: the first measures how far the step may
    // go when every blocking basic is allowed a hair of slack past its
    // bound, the second picks the best-conditioned pivot among the rows
    // that block inside that range; a noise-sized entry is never forced
    // into the basis while a cleaner row stops at essentially the same
    // point. Feasible basics block at the bound they approach,
    // infeasible ones where they regain feasibility.
    double t_enter = hi_[ju] - lo_[ju];  // bound-to-bound flip
    auto block_step = [&](int k, bool* at_upper) -> double {
      double wk = w[static_cast<std::size_t>(k)];
      if (std::fabs(wk) <= ctl_.pivot_tol) return -1.0;
      auto jb = static_cast<std::size_t>(basic_[static_cast<std::size_t>(k)]);
      double rate = -dir * wk;  // d x_B[k] / d t
      double v = xval_[jb], L = lo_[jb], H = hi_[jb];
      double ftl = ctl_.feas_tol * (1.0 + std::fabs(v));
      double tk;
      if (phase1 && v < L - ftl) {
        if (rate <= 0) return -1.0;
        tk = (L - v) / rate;
        *at_upper = false;
      } else if (phase1 && v > H + ftl) {
        if (rate >= 0) return -1.0;
        tk = (v - H) / (-rate);
        *at_upper = true;
      } else if (rate < 0) {
        if (L == -kInf) return -1.0;
        tk = (v - L) / (-rate);
        *at_upper = false;
      } else {
        if (H == kInf) return -1.0;
        tk = (H - v) / rate;
        *at_upper = true;
      }
      return tk < 0 ? 0.0 : tk;
    };

    double tmax = t_enter;
    for (int k = 0; k < m; ++k) {
      bool up;
      double tk = block_step(k, &up);
      if (tk < 0) continue;
      auto jb = static_cast<std::size_t>(basic_[static_cast<std::size_t>(k)]);
      double slack = ctl_.feas_tol * (1.0 + std::fabs(xval_[jb]));
      double trel = tk + slack / std::fabs(w[static_cast<std::size_t>(k)]);
      if (trel < tmax) tmax = trel;
    }

    double tmin = t_enter;
    int leave_pos = -1;
    bool leave_at_upper = false;
    double leave_w = 0;
    for (int k = 0; k < m; ++k) {
      bool up;
      double tk = block_step(k, &up);
      if (tk < 0 || tk > tmax) continue;
      double wk = w[static_cast<std::size_t>(k)];
      bool take;
      if (leave_pos < 0)
        take = true;
      else if (bland_)
        take = basic_[static_cast<std::size_t>(k)] <
               basic_[static_cast<std::size_t>(leave_pos)];
      else
        take = std::fabs(wk) > std::fabs(leave_w);
      if (take) {
        tmin = tk;
        leave_pos = k;
        leave_at_upper = up;
        leave_w = wk;
      }
    }

    if (leave_pos < 0 && !std::isfinite(t_enter)) return LpStatus::Numerical;

    ++iters_;
    if (leave_pos < 0) {
      // bound flip
      double nv = dir > 0 ? hi_[ju] : lo_[ju];
      double delta = nv - xval_[ju];
      for (int k = 0; k < m; ++k) {
        double wk = w[static_cast<std::size_t>(k)];
        if (wk != 0.0)
          xval_[static_cast<std::size_t>(basic_[static_cast<std::size_t>(k)])] -=
              delta * wk;
      }
      xval_[ju] = nv;
      stat_[ju] = dir > 0 ? AtUpper : AtLower;
      degen_run_ = 0;
      bland_ = false;
      continue;
    }

    double t = tmin;
    if (t <= 1e-12) {
      if (++degen_run_ > ctl_.bland_trigger) bland_ = true;
    } else {
      degen_run_ = 0;
      bland_ = false;
    }

    for (int k = 0; k < m; ++k) {
      double wk = w[static_cast<std::size_t>(k)];
      if (wk != 0.0)
        xval_[static_cast<std::size_t>(basic_[static_cast<std::size_t>(k)])] -=
            dir * t * wk;
    }
    double enter_val = xval_[ju] + dir * t;
    auto lv = static_cast<std::size_t>(basic_[static_cast<std::size_t>(leave_pos)]);
    xval_[lv] = leave_at_upper ? hi_[lv] : lo_[lv];
    stat_[lv] = leave_at_upper ? AtUpper : AtLower;
    pos_in_basis_[lv] = -1;
    basic_[static_cast<std::size_t>(leave_pos)] = j;
    pos_in_basis_[ju] = leave_pos;
    stat_[ju] = Basic;
    xval_[ju] = enter_val;

    etas_.push_back({leave_pos, w});
    if (std::fabs(leave_w) < 1e-9) {
      if (!refactor()) { fprintf(stderr, "[trace] N3 post-pivot refactor failed leave_w=%.3e iters=%lld\n", leave_w, (long long)iters_); return LpStatus::Numerical; }
      compute_basic_values();
    }
  }
}

LpStatus Simplex::solve() {
  if (basic_.empty()) return LpStatus::Optimal;  // no rows: bounds only

  // rebuild from the all-slack basis; always factorable
  auto slack_reset = [&]() -> bool {
    int m = n_rows();
    std::fill(pos_in_basis_.begin(), pos_in_basis_.end(), -1);
    for (int j = 0; j < static_cast<int>(cols_.size()); ++j) {
      auto ju = static_cast<std::size_t>(j);
      if (stat_[ju] == Basic) {
        stat_[ju] = AtLower;
        xval_[ju] = std::isfinite(lo_[ju]) ? lo_[ju] : 0.0;
      }
    }
    for (int i = 0; i < m; ++i) {
      int s = nstruct_ + i;
      auto su = static_cast<std::size_t>(s);
      stat_[su] = Basic;
      basic_[static_cast<std::size_t>(i)] = s;
      pos_in_basis_[su] = i;
    }
    return refactor();
  };
  if (!factor_ok_ && !refactor() && !slack_reset()) { fprintf(stderr, "[trace] N4 initial factor failed\n"); return LpStatus::Numerical; }
  compute_basic_values();

  // a warm basis assembled from many near-parallel cut rows can go
  // singular; one restart from scratch is allowed before giving up
  bool reset_used = false;
  auto retreat = [&]() -> bool {
    if (reset_used || !slack_reset()) return false;
    reset_used = true;
    compute_basic_values();
    return true;
  };

  for (int attempt = 0; attempt < 5; ++attempt) {
    LpStatus st = iterate(true);
    fprintf(stderr, "[trace] solve attempt=%d phase1 st=%d infeas=%.3e resid=%.3e iters=%lld\n", attempt, (int)st, infeasibility(), max_residual(), (long long)iters_);
    if (st == LpStatus::Numerical && retreat()) { fprintf(stderr, "[trace] retreat after phase1\n"); continue; }
    if (st != LpStatus::Optimal) return st;
    if (infeasibility() > 1e-7) {
      // trust the verdict only if the iterate state still matches the
      // row system; otherwise rebuild and retry once
      if (max_residual() <= 1e-7 || attempt > 0) { fprintf(stderr, "[trace] I1 declared infeasible attempt=%d infeas=%.3e resid=%.3e\n", attempt, infeasibility(), max_residual()); return LpStatus::Infeasible; }
      if (!refactor()) { fprintf(stderr, "[trace] N5 refactor failed after infeas verdict\n"); return LpStatus::Numerical; }
      compute_basic_values();
      continue;
    }
    st = iterate(false);
    fprintf(stderr, "[trace] solve attempt=%d phase2 st=%d infeas=%.3e resid=%.3e iters=%lld\n", attempt, (int)st, infeasibility(), max_residual(), (long long)iters_);
    if (st == LpStatus::Numerical && retreat()) { fprintf(stderr, "[trace] retreat after phase2\n"); continue; }
    if (st != LpStatus::Optimal) return st;
    if (max_residual() <= 1e-7 && infeasibility() <= 1e-7)
      return LpStatus::Optimal;
    // drift: rebuild the factor and resume; a repeat offender restarts
    // from the slack basis instead
    fprintf(stderr, "[trace] drift attempt=%d infeas=%.3e resid=%.3e\n", attempt, infeasibility(), max_residual());
    if (attempt >= 1 && retreat()) continue;
    if (!refactor()) { fprintf(stderr, "[trace] N6 drift refactor failed\n"); return LpStatus::Numerical; }
    compute_basic_values();
  }
  fprintf(stderr, "[trace] N7 attempts exhausted\n");
  return LpStatus::Numerical;
}

LpSolution solve_lp(const LinearProgram& lp, const SimplexControls& c) {
  Simplex s(lp, c);
  LpSolution out;
  out.status = s.solve();
  out.objective = s.objective();
  out.x = s.solution();
  out.iterations = s.iterations();
  return out;
}

}  // namespace pwcvx
