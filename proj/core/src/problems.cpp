#include "pwcvx/problems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace pwcvx {

namespace {

// Grid min/max of f over [lo, hi] plus a slope-based safety margin, so
// the returned interval certainly contains the true range.
struct RangeEstimate {
  double lo = 0, hi = 0;
};

RangeEstimate safe_range(const UnivariateFunction& f, double lo, double hi,
                         int n = 2000) {
  double gmin = f.eval(lo), gmax = gmin, slope = std::abs(f.deriv(lo));
  for (int i = 1; i <= n; ++i) {
    double x = lo + (hi - lo) * i / n;
    double v = f.eval(x);
    gmin = std::min(gmin, v);
    gmax = std::max(gmax, v);
    slope = std::max(slope, std::abs(f.deriv(x)));
  }
  double margin = slope * (hi - lo) / n + 1e-9 * (1.0 + std::abs(gmax));
  return {gmin - margin, gmax + margin};
}

}  // namespace

double NckInstance::capacity() const {
  double sw = 0;
  for (double wi : w) sw += wi;
  return 50.0 * sw;
}

UnivariateFunction nck_trig_profile() {
  const double pi = std::numbers::pi;
  UnivariateFunction f;
  f.terms.push_back(SineTerm{7.5, pi / 40.0, -pi / 4.0});
  f.terms.push_back(CosineTerm{-15.0, pi / 80.0, -pi / 8.0});
  f.terms.push_back(PolynomialTerm{{19.5}});
  return f;
}

NckInstance gen_nck(int n, NckFamily family, std::uint64_t seed) {
  if (n <= 0) throw std::runtime_error("gen_nck: n must be positive");
  NckInstance inst;
  inst.n = n;
  inst.seed = seed;
  inst.family = family;
  Rng rng(seed);
  inst.w.resize(n);
  for (int j = 0; j < n; ++j) inst.w[j] = rng.uniform(1.0, 100.0);
  inst.g.resize(n);
  for (int j = 0; j < n; ++j) {
    if (family == NckFamily::Trig) {
      inst.g[j] = nck_trig_profile();
    } else {
      double a = rng.uniform(0.1, 0.2);
      double b = rng.uniform(0.0, 100.0);
      double c = rng.uniform(0.0, 100.0);
      double d = rng.uniform(-100.0, 0.0);
      inst.g[j].terms.push_back(LogisticTerm{a, b, c, d});
    }
  }
  return inst;
}

UflInstance gen_ufl(int K, int T, int type, std::uint64_t seed) {
  if (K <= 0 || T <= 0) throw std::runtime_error("gen_ufl: K,T must be positive");
  UflInstance inst;
  inst.K = K;
  inst.T = T;
  inst.type = type;
  inst.seed = seed;
  switch (type) {
    case 1: inst.a = 15; inst.b = 2;  inst.c = 1; break;
    case 2: inst.a = 25; inst.b = 5;  inst.c = 5; break;
    case 3: inst.a = 25; inst.b = 10; inst.c = 5; break;
    default: throw std::runtime_error("gen_ufl: type must be 1, 2 or 3");
  }
  Rng rng(seed);
  inst.open_cost.resize(K);
  for (int k = 0; k < K; ++k) inst.open_cost[k] = rng.uniform(1.0, 100.0);
  return inst;
}

namespace {

SeparableProblem nck_to_separable(const NckInstance& inst) {
  int n = inst.n;
  SeparableProblem p;
  p.obj.assign(2 * n, 0.0);
  p.lo.assign(2 * n, 0.0);
  p.hi.assign(2 * n, 0.0);
  for (int j = 0; j < n; ++j) {
    p.lo[j] = 0.0;
    p.hi[j] = 100.0;
    RangeEstimate r = safe_range(inst.g[j], 0.0, 100.0);
    p.lo[n + j] = std::min(0.0, r.lo);
    p.hi[n + j] = r.hi;
    p.obj[n + j] = -1.0;  // maximize total profit
  }
  ProblemRow knap;
  for (int j = 0; j < n; ++j) knap.linear.push_back({j, inst.w[j]});
  knap.sense = RowSense::LE;
  knap.rhs = inst.capacity();
  p.rows.push_back(std::move(knap));
  for (int j = 0; j < n; ++j) {
    ProblemRow r;
    r.linear.push_back({n + j, 1.0});
    NonlinearTerm t;
    t.var = j;
    t.fn = inst.g[j].negated();  // p_j - g_j(x_j) <= 0
    r.nonlinear.push_back(std::move(t));
    r.sense = RowSense::LE;
    r.rhs = 0.0;
    p.rows.push_back(std::move(r));
  }
  return p;
}

SeparableProblem ufl_to_separable(const UflInstance& inst) {
  int K = inst.K, T = inst.T;
  int nw = K * T;
  auto widx = [T](int k, int t) { return k * T + t; };
  auto sidx = [nw, T](int k, int t) { return nw + k * T + t; };
  int ybase = 2 * nw;
  UnivariateFunction g;
  g.terms.push_back(SquaredCompositeTerm{inst.a, inst.b, inst.c});
  RangeEstimate r = safe_range(g, 0.0, 1.0);

  SeparableProblem p;
  int nv = 2 * nw + K;
  p.obj.assign(nv, 0.0);
  p.lo.assign(nv, 0.0);
  p.hi.assign(nv, 0.0);
  for (int i = 0; i < nw; ++i) p.hi[i] = 1.0;
  for (int i = 0; i < nw; ++i) {
    p.hi[nw + i] = std::max(0.0, r.hi);
    p.obj[nw + i] = 1.0;
  }
  for (int k = 0; k < K; ++k) {
    p.hi[ybase + k] = 1.0;
    p.obj[ybase + k] = inst.open_cost[k];
    p.binary.push_back(ybase + k);
  }
  for (int t = 0; t < T; ++t) {
    ProblemRow row;
    for (int k = 0; k < K; ++k) row.linear.push_back({widx(k, t), 1.0});
    row.sense = RowSense::EQ;
    row.rhs = 1.0;
    p.rows.push_back(std::move(row));
  }
  for (int k = 0; k < K; ++k)
    for (int t = 0; t < T; ++t) {
      ProblemRow row;
      row.linear.push_back({widx(k, t), 1.0});
      row.linear.push_back({ybase + k, -1.0});
      row.sense = RowSense::LE;
      row.rhs = 0.0;
      p.rows.push_back(std::move(row));
    }
  for (int k = 0; k < K; ++k)
    for (int t = 0; t < T; ++t) {
      ProblemRow row;
      row.linear.push_back({sidx(k, t), -1.0});
      NonlinearTerm nt;
      nt.var = widx(k, t);
      nt.fn = g;  // g(w) - s <= 0
      row.nonlinear.push_back(std::move(nt));
      row.sense = RowSense::LE;
      row.rhs = 0.0;
      p.rows.push_back(std::move(row));
    }
  return p;
}

}  // namespace

SeparableProblem to_separable(const ProblemInstance& inst,
                              const BreakpointOptions& opts) {
  SeparableProblem p = std::visit(
      [](const auto& i) {
        if constexpr (std::is_same_v<std::decay_t<decltype(i)>, NckInstance>)
          return nck_to_separable(i);
        else
          return ufl_to_separable(i);
      },
      inst);
  decompose_all(p, opts);
  return p;
}

namespace {

RepairResult repair_nck(const NckInstance& inst, const std::vector<double>& x) {
  int n = inst.n;
  RepairResult res;
  res.point.assign(2 * n, 0.0);
  double load = 0;
  for (int j = 0; j < n; ++j) {
    double v = j < static_cast<int>(x.size()) ? x[j] : 0.0;
    v = std::clamp(v, 0.0, 100.0);
    res.point[j] = v;
    load += inst.w[j] * v;
  }
  double cap = inst.capacity();
  if (load > cap && load > 0) {
    double scale = cap / load;
    for (int j = 0; j < n; ++j) res.point[j] *= scale;
  }
  for (int j = 0; j < n; ++j) {
    double pj = inst.g[j].eval(res.point[j]);
    res.point[n + j] = pj;
    res.objective -= pj;
  }
  return res;
}

RepairResult repair_ufl(const UflInstance& inst, const std::vector<double>& x) {
  int K = inst.K, T = inst.T;
  int nw = K * T;
  auto widx = [T](int k, int t) { return k * T + t; };
  UnivariateFunction g;
  g.terms.push_back(SquaredCompositeTerm{inst.a, inst.b, inst.c});

  std::vector<double> w(nw, 0.0);
  for (int i = 0; i < nw; ++i)
    if (i < static_cast<int>(x.size())) w[i] = std::clamp(x[i], 0.0, 1.0);
  std::vector<char> open(K, 0);
  bool any = false;
  for (int k = 0; k < K; ++k) {
    int yi = 2 * nw + k;
    if (yi < static_cast<int>(x.size()) && x[yi] >= 0.5) open[k] = 1, any = true;
  }
  if (!any) {
    // no facility survives rounding: open the one carrying the most flow
    int best = 0;
    double bestload = -1;
    for (int k = 0; k < K; ++k) {
      double load = 0;
      for (int t = 0; t < T; ++t) load += w[widx(k, t)];
      if (load > bestload) bestload = load, best = k;
    }
    open[best] = 1;
  }
  for (int t = 0; t < T; ++t) {
    double sum = 0;
    int argmax = -1;
    double vmax = -1;
    for (int k = 0; k < K; ++k) {
      double& v = w[widx(k, t)];
      if (!open[k]) {
        v = 0;
        continue;
      }
      if (v > vmax) vmax = v, argmax = k;
      sum += v;
    }
    if (sum > 1e-12) {
      for (int k = 0; k < K; ++k) w[widx(k, t)] /= open[k] ? sum : 1.0;
    } else {
      w[widx(argmax, t)] = 1.0;
    }
  }
  RepairResult res;
  res.point.assign(2 * nw + K, 0.0);
  for (int i = 0; i < nw; ++i) res.point[i] = w[i];
  for (int k = 0; k < K; ++k) {
    double used = 0;
    for (int t = 0; t < T; ++t) used = std::max(used, w[widx(k, t)]);
    if (used > 1e-12) {
      res.point[2 * nw + k] = 1.0;
      res.objective += inst.open_cost[k];
    }
  }
  for (int i = 0; i < nw; ++i) {
    double s = g.eval(w[i]);
    res.point[nw + i] = s;
    res.objective += s;
  }
  return res;
}

}  // namespace

RepairResult evaluate_and_repair(const ProblemInstance& inst,
                                 const std::vector<double>& x) {
  return std::visit(
      [&](const auto& i) {
        if constexpr (std::is_same_v<std::decay_t<decltype(i)>, NckInstance>)
          return repair_nck(i, x);
        else
          return repair_ufl(i, x);
      },
      inst);
}

double instance_objective(const ProblemInstance& inst,
                          const std::vector<double>& x) {
  if (const auto* nck = std::get_if<NckInstance>(&inst)) {
    double obj = 0;
    for (int j = 0; j < nck->n; ++j) obj -= x.at(nck->n + j);
    return obj;
  }
  const auto& u = std::get<UflInstance>(inst);
  int nw = u.K * u.T;
  double obj = 0;
  for (int i = 0; i < nw; ++i) obj += x.at(nw + i);
  for (int k = 0; k < u.K; ++k) obj += u.open_cost[k] * x.at(2 * nw + k);
  return obj;
}

Decomposition refine_intervals(const UnivariateFunction& f,
                               const Decomposition& d, double x_star) {
  Decomposition out;
  out.lo = d.lo;
  out.hi = d.hi;
  out.near_linear = d.near_linear;
  // both halves must clear the decomposer's minimum segment length;
  // numerically located breakpoints sit within root_tol of the split
  // point when the caller aims at one, and a sliver segment would have
  // a meaningless secant
  const double min_len = 1e-8;
  for (const Segment& s : d.segments) {
    if (s.convex || x_star - s.lo < min_len || s.hi - x_star < min_len) {
      out.segments.push_back(s);
      continue;
    }
    // Secants of a concave function tighten under refinement; both halves
    // stay concave because curvature does not change inside a segment.
    double gl = f.eval(s.lo), gm = f.eval(x_star), gh = f.eval(s.hi);
    Segment a = s, b = s;
    a.hi = x_star;
    a.secant_slope = (gm - gl) / (x_star - s.lo);
    b.lo = x_star;
    b.secant_slope = (gh - gm) / (s.hi - x_star);
    out.segments.push_back(a);
    out.segments.push_back(b);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Instance JSON. Drawn values are stored; derived quantities (capacity,
// congestion coefficients, the trig profile) are reconstructed on load.
// ---------------------------------------------------------------------------

std::string instance_to_json(const ProblemInstance& inst) {
  using nlohmann::json;
  json j;
  if (const auto* nck = std::get_if<NckInstance>(&inst)) {
    j["kind"] = "nck";
    j["n"] = nck->n;
    j["seed"] = nck->seed;
    j["family"] = nck->family == NckFamily::Trig ? "trig" : "logistic";
    j["w"] = nck->w;
    if (nck->family == NckFamily::Logistic) {
      json gs = json::array();
      for (const auto& f : nck->g) gs.push_back(json::parse(to_json_string(f)));
      j["g"] = std::move(gs);
    }
  } else {
    const auto& u = std::get<UflInstance>(inst);
    j["kind"] = "ufl";
    j["K"] = u.K;
    j["T"] = u.T;
    j["type"] = u.type;
    j["seed"] = u.seed;
    j["open_cost"] = u.open_cost;
  }
  return j.dump(2) + "\n";
}

ProblemInstance instance_from_json(const std::string& text) {
  using nlohmann::json;
  json j = json::parse(text);
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "nck") {
    NckInstance inst;
    inst.n = j.at("n").get<int>();
    inst.seed = j.at("seed").get<std::uint64_t>();
    std::string fam = j.at("family").get<std::string>();
    inst.family = fam == "trig" ? NckFamily::Trig : NckFamily::Logistic;
    inst.w = j.at("w").get<std::vector<double>>();
    if (static_cast<int>(inst.w.size()) != inst.n)
      throw std::runtime_error("instance json: w length mismatch");
    inst.g.resize(inst.n);
    if (inst.family == NckFamily::Trig) {
      for (auto& f : inst.g) f = nck_trig_profile();
    } else {
      const json& gs = j.at("g");
      if (static_cast<int>(gs.size()) != inst.n)
        throw std::runtime_error("instance json: g length mismatch");
      for (int i = 0; i < inst.n; ++i)
        inst.g[i] = function_from_json(gs[i].dump());
    }
    return inst;
  }
  if (kind == "ufl") {
    UflInstance probe = gen_ufl(j.at("K").get<int>(), j.at("T").get<int>(),
                                j.at("type").get<int>(),
                                j.at("seed").get<std::uint64_t>());
    probe.open_cost = j.at("open_cost").get<std::vector<double>>();
    if (static_cast<int>(probe.open_cost.size()) != probe.K)
      throw std::runtime_error("instance json: open_cost length mismatch");
    return probe;
  }
  throw std::runtime_error("instance json: unknown kind '" + kind + "'");
}

ProblemInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return instance_from_json(ss.str());
}

void save_instance(const ProblemInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << instance_to_json(inst);
}

}  // namespace pwcvx
