#include "pwcvx/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>

#include "pwcvx/formulation.hpp"

namespace pwcvx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct BoundDelta {
  int var;
  double lo, hi;
};

// Segment-indicator lookup: which (block, segment) a y variable drives.
struct YOwner {
  int block = -1, seg = -1;
};

std::vector<YOwner> build_y_owners(const Model& m) {
  std::vector<YOwner> own(static_cast<std::size_t>(m.n_vars()));
  for (int b = 0; b < static_cast<int>(m.blocks.size()); ++b) {
    const auto& blk = m.blocks[static_cast<std::size_t>(b)];
    for (int s = 0; s < static_cast<int>(blk.segs.size()); ++s) {
      int y = blk.segs[static_cast<std::size_t>(s)].y;
      if (y >= 0) own[static_cast<std::size_t>(y)] = {b, s};
    }
  }
  return own;
}

// Bound fixings implied by branching an indicator, the branched variable
// included. Segment structure makes these exact, not heuristic.
std::vector<BoundDelta> implications(const Model& m,
                                     const std::vector<YOwner>& own, int var,
                                     bool to_one) {
  std::vector<BoundDelta> out;
  double v = to_one ? 1.0 : 0.0;
  out.push_back({var, v, v});
  const YOwner& o = own[static_cast<std::size_t>(var)];
  if (o.block < 0) return out;  // plain model binary (no segment block)
  const auto& segs = m.blocks[static_cast<std::size_t>(o.block)].segs;
  int S = static_cast<int>(segs.size());
  switch (m.kind) {
    case FormulationKind::IM:
      if (to_one) {
        for (int s = 0; s < o.seg; ++s) {
          const auto& sv = segs[static_cast<std::size_t>(s)];
          out.push_back({sv.y, 1.0, 1.0});
          double len = sv.hi - sv.lo;
          out.push_back({sv.x, len, len});
        }
      } else {
        for (int s = o.seg; s < S; ++s) {
          const auto& sv = segs[static_cast<std::size_t>(s)];
          if (s > o.seg) out.push_back({sv.y, 0.0, 0.0});
          out.push_back({sv.x, 0.0, 0.0});
        }
      }
      break;
    case FormulationKind::MCM:
      if (to_one) {
        const auto& sv = segs[static_cast<std::size_t>(o.seg)];
        out.push_back({sv.x, sv.lo, sv.hi});
        for (int s = 0; s < S; ++s) {
          if (s == o.seg) continue;
          const auto& sv2 = segs[static_cast<std::size_t>(s)];
          out.push_back({sv2.y, 0.0, 0.0});
          out.push_back({sv2.x, 0.0, 0.0});
        }
      } else {
        out.push_back({segs[static_cast<std::size_t>(o.seg)].x, 0.0, 0.0});
      }
      break;
    case FormulationKind::CCM:
      if (to_one) {
        for (int s = 0; s < S; ++s) {
          if (s == o.seg) continue;
          const auto& sv2 = segs[static_cast<std::size_t>(s)];
          out.push_back({sv2.y, 0.0, 0.0});
          out.push_back({sv2.mu, 0.0, 0.0});
          out.push_back({sv2.lam, 0.0, 0.0});
        }
      } else {
        const auto& sv = segs[static_cast<std::size_t>(o.seg)];
        out.push_back({sv.mu, 0.0, 0.0});
        out.push_back({sv.lam, 0.0, 0.0});
      }
      break;
  }
  return out;
}

struct Node {
  long id = 0;
  int parent = -1;
  int depth = 0;
  double bound = -kInf;
  int branch_var = -1;
  bool branch_up = false;
  double branch_frac = 0;
  std::vector<BoundDelta> deltas;
};

struct Driver {
  const Model& m;
  const SolveConfig& cfg;
  Simplex sx;
  CutPool pool;
  Clock::time_point t0 = Clock::now();
  int total_cuts = 0;

  Driver(const Model& model, const SolveConfig& c)
      : m(model), cfg(c), sx(make_lp(model, c), c.simplex) {
    for (const auto& cut : initial_cuts(model, c.initial_cut_k))
      pool.insert(cut);
  }

  static LinearProgram make_lp(const Model& model, const SolveConfig& c) {
    LinearProgram lp = model_to_lp(model);
    for (const auto& cut : initial_cuts(model, c.initial_cut_k)) {
      ModelRow r = cut_row(cut, model.terms[static_cast<std::size_t>(cut.term)]);
      lp.rows.push_back({r.terms, r.sense, r.rhs});
    }
    return lp;
  }

  bool time_up() const { return seconds_since(t0) >= cfg.time_limit; }

  Assignment point() const { return sx.solution(); }

  /// Adds every new violated cut at the current point; count of rows added.
  int add_violated(const Assignment& a) {
    auto cuts = separate(m, a, {cfg.cut_eps, cfg.eps_y});
    if (cfg.max_cuts_per_round > 0 &&
        static_cast<int>(cuts.size()) > cfg.max_cuts_per_round) {
      std::partial_sort(cuts.begin(), cuts.begin() + cfg.max_cuts_per_round,
                        cuts.end(), [](const Cut& a_, const Cut& b_) {
                          return a_.violation > b_.violation;
                        });
      cuts.resize(static_cast<std::size_t>(cfg.max_cuts_per_round));
    }
    int added = 0;
    std::vector<LpRow> rows;
    for (const auto& c : cuts) {
      if (!pool.insert(c)) continue;
      ModelRow r = cut_row(c, m.terms[static_cast<std::size_t>(c.term)]);
      rows.push_back({r.terms, r.sense, r.rhs});
      ++added;
    }
    if (!rows.empty()) sx.add_rows(rows);
    total_cuts += added;
    return added;
  }
};

}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return "optimal";
    case SolveStatus::TimeLimit:
      return "time_limit";
    case SolveStatus::Infeasible:
      return "infeasible";
  }
  return "?";
}

double mip_gap_percent(double incumbent, double bound) {
  return 100.0 * std::fabs(incumbent - bound) / (1e-10 + std::fabs(incumbent));
}

LinearProgram model_to_lp(const Model& m) {
  LinearProgram lp;
  lp.obj = m.obj;
  lp.lo.resize(static_cast<std::size_t>(m.n_vars()));
  lp.hi.resize(static_cast<std::size_t>(m.n_vars()));
  for (int j = 0; j < m.n_vars(); ++j) {
    lp.lo[static_cast<std::size_t>(j)] = m.vars[static_cast<std::size_t>(j)].lo;
    lp.hi[static_cast<std::size_t>(j)] = m.vars[static_cast<std::size_t>(j)].hi;
  }
  for (const auto& r : m.rows) lp.rows.push_back({r.terms, r.sense, r.rhs});
  return lp;
}

namespace {

RootResult run_root(Driver& D) {
  RootResult rr;
  Clock::time_point start = Clock::now();
  for (;;) {
    rr.lp_status = D.sx.solve();
    if (rr.lp_status != LpStatus::Optimal) break;
    Assignment a = D.point();
    if (rr.rounds >= D.cfg.max_root_rounds || D.time_up()) break;
    int added = D.add_violated(a);
    if (added == 0) {
      // either clean or a stall on already-known cuts; both end the loop,
      // only the former counts as converged
      auto remaining = separate(D.m, a, {D.cfg.cut_eps, D.cfg.eps_y});
      rr.converged = remaining.empty();
      break;
    }
    rr.cuts += added;
    ++rr.rounds;
  }
  rr.bound = D.sx.objective();
  rr.point = D.point();
  rr.seconds = seconds_since(start);
  return rr;
}

}  // namespace

RootResult solve_root_relaxation(const Model& m, const SolveConfig& cfg) {
  Driver D(m, cfg);
  return run_root(D);
}

namespace {

struct Incumbent {
  double value = kInf;
  Assignment point;
  bool found() const { return std::isfinite(value); }
};

struct PseudoCosts {
  std::vector<double> up_sum, dn_sum;
  std::vector<int> up_n, dn_n;
  void init(int n) {
    up_sum.assign(static_cast<std::size_t>(n), 0.0);
    dn_sum.assign(static_cast<std::size_t>(n), 0.0);
    up_n.assign(static_cast<std::size_t>(n), 0);
    dn_n.assign(static_cast<std::size_t>(n), 0);
  }
  void record(int var, bool up, double gain_per_frac) {
    auto v = static_cast<std::size_t>(var);
    if (up) {
      up_sum[v] += gain_per_frac;
      ++up_n[v];
    } else {
      dn_sum[v] += gain_per_frac;
      ++dn_n[v];
    }
  }
};

}  // namespace

SolveReport branch_and_cut(const Model& m, const SolveConfig& cfg) {
  SolveReport rep;
  rep.formulation = m.kind;
  rep.strengthened = m.strengthened;
  rep.incumbent_value = kNaN;

  Driver D(m, cfg);
  std::vector<YOwner> owners = build_y_owners(m);

  RootResult root = run_root(D);
  rep.root_bound = root.bound;
  rep.root_cuts = root.cuts;
  rep.root_rounds = root.rounds;
  rep.root_converged = root.converged;
  rep.root_seconds = root.seconds;

  if (root.lp_status == LpStatus::Infeasible) {
    rep.status = SolveStatus::Infeasible;
    rep.root_bound = rep.final_bound = kInf;
    rep.mip_gap_percent = kInf;
    rep.total_seconds = seconds_since(D.t0);
    rep.simplex_iterations = D.sx.iterations();
    return rep;
  }
  if (root.lp_status != LpStatus::Optimal) {
    // no trustworthy relaxation value; report an unknown bound rather
    // than pretend the last iterate proved anything
    rep.status = SolveStatus::TimeLimit;
    rep.root_bound = rep.final_bound = -kInf;
    rep.mip_gap_percent = kInf;
    rep.total_seconds = seconds_since(D.t0);
    rep.simplex_iterations = D.sx.iterations();
    return rep;
  }

  Incumbent inc;
  auto try_point = [&](const std::vector<double>& orig) {
    Assignment lifted = lift_to_model(m, orig);
    if (model_violation(m, lifted) > 1e-6) return;
    double v = model_objective(m, lifted);
    if (v < inc.value - 1e-12) {
      inc.value = v;
      inc.point = std::move(lifted);
    }
  };
  auto run_hook = [&](const Assignment& a) {
    if (!cfg.primal_hook) return;
    std::vector<double> orig(a.begin(), a.begin() + m.n_original);
    if (auto repaired = cfg.primal_hook(orig)) try_point(*repaired);
  };

  std::vector<int> binaries;
  for (int j = 0; j < m.n_vars(); ++j) {
    const auto& v = m.vars[static_cast<std::size_t>(j)];
    if (v.kind == VarKind::Binary && v.lo < v.hi) binaries.push_back(j);
  }

  std::deque<Node> nodes;
  nodes.push_back({});
  nodes.back().bound = root.bound;

  using QEntry = std::pair<double, long>;
  std::priority_queue<QEntry, std::vector<QEntry>, std::greater<QEntry>> heap;
  std::vector<long> stack;
  auto push_open = [&](long id) {
    if (cfg.best_bound)
      heap.push({nodes[static_cast<std::size_t>(id)].bound, id});
    else
      stack.push_back(id);
  };
  auto pop_open = [&]() -> long {
    if (cfg.best_bound) {
      long id = heap.top().second;
      heap.pop();
      return id;
    }
    long id = stack.back();
    stack.pop_back();
    return id;
  };
  auto open_empty = [&]() { return cfg.best_bound ? heap.empty() : stack.empty(); };
  auto best_open_bound = [&]() -> double {
    if (cfg.best_bound) return heap.empty() ? kInf : heap.top().first;
    double b = kInf;
    for (long id : stack)
      b = std::min(b, nodes[static_cast<std::size_t>(id)].bound);
    return b;
  };

  PseudoCosts pc;
  pc.init(m.n_vars());

  if (root.lp_status == LpStatus::Optimal) {
    run_hook(root.point);
    push_open(0);
  }

  std::vector<BoundDelta> prev_applied;
  double abandoned_bound = kInf;  // weakest bound lost to numerical retreat
  bool hit_limit = false;

  auto prune_threshold = [&]() {
    return inc.value - cfg.prune_tol * (1.0 + std::fabs(inc.value));
  };

  while (!open_empty()) {
    if (D.time_up() || rep.nodes >= cfg.node_limit) {
      hit_limit = true;
      break;
    }
    long id = pop_open();
    Node& nd = nodes[static_cast<std::size_t>(id)];
    if (nd.bound >= prune_threshold()) continue;

    // restore base bounds touched by the previous node, then apply this
    // node's ancestor chain root-first so deeper fixings win
    for (const auto& d : prev_applied) {
      const auto& mv = m.vars[static_cast<std::size_t>(d.var)];
      D.sx.set_col_bounds(d.var, mv.lo, mv.hi);
    }
    prev_applied.clear();
    {
      std::vector<long> chain;
      for (long c = id; c >= 0; c = nodes[static_cast<std::size_t>(c)].parent)
        chain.push_back(c);
      for (auto it = chain.rbegin(); it != chain.rend(); ++it)
        for (const auto& d : nodes[static_cast<std::size_t>(*it)].deltas) {
          D.sx.set_col_bounds(d.var, d.lo, d.hi);
          prev_applied.push_back(d);
        }
    }

    LpStatus st = D.sx.solve();
    ++rep.nodes;
    if (st == LpStatus::Infeasible) continue;
    if (st != LpStatus::Optimal) {
      abandoned_bound = std::min(abandoned_bound, nd.bound);
      continue;
    }

    double obj = D.sx.objective();
    if (nd.parent >= 0 && cfg.pseudo_cost) {
      double gain = std::max(0.0, obj - nodes[static_cast<std::size_t>(nd.parent)].bound);
      double dist = nd.branch_up ? 1.0 - nd.branch_frac : nd.branch_frac;
      pc.record(nd.branch_var, nd.branch_up, gain / std::max(dist, 1e-3));
    }
    if (obj >= prune_threshold()) continue;

    // node-local separation budget, then decide integral vs branch;
    // an integral point must also be clean before it can become the
    // incumbent, since the epigraph values are only as true as the cuts
    int extra_rounds = 0;
    Assignment a = D.point();
    for (int r = 0; r < cfg.node_sep_rounds && !D.time_up(); ++r) {
      if (D.add_violated(a) == 0) break;
      st = D.sx.solve();
      if (st != LpStatus::Optimal) break;
      obj = D.sx.objective();
      a = D.point();
      if (obj >= prune_threshold()) break;
    }
    if (st == LpStatus::Infeasible) continue;
    if (st != LpStatus::Optimal) {
      abandoned_bound = std::min(abandoned_bound, std::min(nd.bound, obj));
      continue;
    }
    if (obj >= prune_threshold()) continue;

    auto pick_branch = [&]() -> int {
      int best = -1;
      double best_score = -1;
      for (int j : binaries) {
        if (D.sx.col_lo(j) == D.sx.col_hi(j)) continue;
        double v = a[static_cast<std::size_t>(j)];
        double frac = std::fabs(v - std::round(v));
        if (frac <= cfg.int_tol) continue;
        double score;
        if (cfg.pseudo_cost && pc.up_n[static_cast<std::size_t>(j)] > 0 &&
            pc.dn_n[static_cast<std::size_t>(j)] > 0) {
          double up = pc.up_sum[static_cast<std::size_t>(j)] /
                      pc.up_n[static_cast<std::size_t>(j)];
          double dn = pc.dn_sum[static_cast<std::size_t>(j)] /
                      pc.dn_n[static_cast<std::size_t>(j)];
          score = std::min(up * (1.0 - v), dn * v) + 1e-9 * std::min(v, 1.0 - v);
        } else {
          score = std::min(v, 1.0 - v);
        }
        if (score > best_score + 1e-15) {
          best_score = score;
          best = j;
        }
      }
      return best;
    };

    int bv = pick_branch();
    while (bv < 0) {
      // integral point: drive the links clean, re-checking integrality
      // after every resolve since new cuts can move the point
      if (D.add_violated(a) == 0) {
        if (obj < inc.value - 1e-12) {
          inc.value = obj;
          inc.point = a;
        }
        bv = -2;
        break;
      }
      st = D.sx.solve();
      if (st != LpStatus::Optimal) break;
      obj = D.sx.objective();
      a = D.point();
      if (obj >= prune_threshold()) break;
      if (++extra_rounds > 60 || D.time_up()) {
        hit_limit = hit_limit || D.time_up();
        break;
      }
      bv = pick_branch();
    }
    if (bv < 0) {
      if (st == LpStatus::Infeasible) continue;
      if (st != LpStatus::Optimal)
        abandoned_bound = std::min(abandoned_bound, std::min(nd.bound, obj));
      else if (bv == -1 && obj < prune_threshold())
        abandoned_bound = std::min(abandoned_bound, obj);  // cleanup cut short
      continue;
    }

    if (nd.depth <= 2 || rep.nodes % 16 == 0) run_hook(a);

    double frac = a[static_cast<std::size_t>(bv)];
    bool prefer_up = frac >= 0.5;
    long idd = static_cast<long>(nodes.size());
    nodes.push_back({idd, static_cast<int>(id), nd.depth + 1, obj, bv, false,
                     frac, implications(m, owners, bv, false)});
    long idu = static_cast<long>(nodes.size());
    nodes.push_back({idu, static_cast<int>(id), nd.depth + 1, obj, bv, true,
                     frac, implications(m, owners, bv, true)});
    if (cfg.best_bound || prefer_up) {
      push_open(idd);
      push_open(idu);
    } else {
      push_open(idu);
      push_open(idd);
    }
  }

  rep.total_cuts = D.total_cuts;
  rep.simplex_iterations = D.sx.iterations();
  rep.total_seconds = seconds_since(D.t0);
  rep.incumbent_value = inc.found() ? inc.value : kNaN;
  rep.incumbent = inc.point;

  double open_bound = std::min(best_open_bound(), abandoned_bound);
  if (!hit_limit && open_empty() && abandoned_bound == kInf) {
    if (inc.found()) {
      rep.status = SolveStatus::Optimal;
      rep.final_bound = inc.value;
      rep.mip_gap_percent = 0.0;
    } else {
      rep.status = SolveStatus::Infeasible;
      rep.final_bound = kInf;
      rep.mip_gap_percent = kInf;
    }
  } else {
    rep.status = SolveStatus::TimeLimit;
    rep.final_bound = std::min(inc.value, open_bound);
    rep.mip_gap_percent =
        inc.found() ? mip_gap_percent(inc.value, rep.final_bound) : kInf;
  }
  return rep;
}

}  // namespace pwcvx
