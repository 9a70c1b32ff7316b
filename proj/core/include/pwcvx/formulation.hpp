#pragma once

#include "pwcvx/model.hpp"

namespace pwcvx {

struct ImOptions {
  bool strengthened = true;     // perspective links; false: y-free links
  bool fix_first_binary = true; // y of the first segment pinned to 1
};

/// Incremental model: per pair (row, var) the segment loads x^s fill in
/// order, controlled by nested indicators y^s (y^1 significant; the
/// trailing y^{S+1} is identically 0 and not represented).
Model build_im(const SeparableProblem& p, const ImOptions& opts = {});

/// Multiple-choice model: exactly one active segment per pair; segment
/// load carries the whole variable. The `strengthened` flag is accepted
/// for interface symmetry, but the links of this model are perspective
/// links either way: with the chosen per-segment bounds the valid linear
/// inequalities for a segment are exactly its perspective cuts, so there
/// is no weaker useful variant to build.
Model build_mcm(const SeparableProblem& p, bool strengthened = true);

/// Convex-combination model: segment loads expressed through endpoint
/// weights mu (left) and lam (right); y^s = mu^s + lam^s. Secant
/// segments need no epigraph variable at all, their contribution is
/// g(lo) mu + g(hi) lam.
Model build_ccm(const SeparableProblem& p, bool strengthened = true);

Model build_model(const SeparableProblem& p, FormulationKind kind,
                  bool strengthened = true);

/// Carry an IM-feasible point to the MCM of the same problem:
///   y^s = psi^s - psi^{s+1},  x^s = phi^s + l^s psi^s - l^{s+1} psi^{s+1}
/// (phi, psi are the IM loads/indicators, psi^{S+1} = 0), epigraph
/// values re-evaluated exactly. Preserves feasibility and objective.
Assignment map_im_to_mcm(const Model& im, const Assignment& a,
                         const Model& mcm);

/// Carry an MCM-feasible point to the CCM:
///   mu = (l^{s+1} y - x)/len,  lam = (x - l^s y)/len.
Assignment map_mcm_to_ccm(const Model& mcm, const Assignment& a,
                          const Model& ccm);

/// Lift a point of the original variable space to a model assignment:
/// indicators set by the segment containing each value, loads filled
/// accordingly, epigraph variables at their exact values. The result is
/// integral in the binaries.
Assignment lift_to_model(const Model& m, const std::vector<double>& x);

}  // namespace pwcvx
