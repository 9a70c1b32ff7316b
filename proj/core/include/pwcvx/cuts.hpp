#pragma once

#include <set>
#include <vector>

#include "pwcvx/model.hpp"

namespace pwcvx {

/// Outer-approximation cut for one epigraph link, generated at ratio q:
///   z >= ax * X + ay * y + cst
/// (X is the term's linear form; ay = 0 and cst carries the tangent
/// offset for the y-free links, cst = 0 for perspective links).
struct Cut {
  int term = -1;
  double q = 0;
  double ax = 0, ay = 0, cst = 0;
  double violation = 0;
};

/// Tangent of the link surface at ratio q (clamped into [q_lo, q_hi]).
Cut make_cut(const PerspectiveTerm& t, int term_index, double q);

/// Violation of a cut at a point (positive means the point is cut off).
double cut_violation(const Cut& c, const PerspectiveTerm& t,
                     const Assignment& a);

/// Cut as a model row: ax * X + ay * y - z <= -cst.
ModelRow cut_row(const Cut& c, const PerspectiveTerm& t);

struct SeparateOptions {
  double eps_cut = 1e-6;  // keep cuts at least this violated
  double eps_y = 1e-9;    // indicator below this counts as off
};

/// Most violated tangent per term at the given point; the ratio is read
/// off the point itself (midpoint fallback when the indicator vanishes
/// but load remains).
std::vector<Cut> separate(const Model& m, const Assignment& a,
                          const SeparateOptions& opts = {});

/// k tangents per term at evenly spaced ratios, violation unset.
std::vector<Cut> initial_cuts(const Model& m, int k);

/// Deduplication by (term, q) with q rounded to 1e-7.
class CutPool {
 public:
  /// True when the cut is new; remembered either way.
  bool insert(const Cut& c);
  std::size_t size() const { return seen_.size(); }

 private:
  std::set<std::pair<int, long long>> seen_;
};

}  // namespace pwcvx
