#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pwcvx/acceptance.hpp"
#include "pwcvx/formulation.hpp"
#include "pwcvx/harness.hpp"
#include "pwcvx/lp_file.hpp"
#include "pwcvx/oracles.hpp"
#include "pwcvx/problems.hpp"
#include "pwcvx/rng.hpp"
#include "pwcvx/solver.hpp"
#include "pwcvx/univariate.hpp"

namespace {

using nlohmann::json;

// Exit codes: 0 success, 1 usage error, 2 solve failure.
constexpr int kOk = 0;
constexpr int kSolveFailure = 2;

// ---------------------------------------------------------------------------
// Shared option plumbing
// ---------------------------------------------------------------------------

/// Registers the solver configuration under the exact SolveConfig field
/// names, so scripted runs read like the code that consumes them.
void add_config_options(CLI::App* cmd, pwcvx::SolveConfig& cfg) {
  cmd->add_option("--feas_tol", cfg.feas_tol, "primal feasibility tolerance");
  cmd->add_option("--int_tol", cfg.int_tol, "integrality tolerance");
  cmd->add_option("--cut_eps", cfg.cut_eps, "separation violation threshold");
  cmd->add_option("--eps_y", cfg.eps_y, "indicator treated as off below this");
  cmd->add_option("--initial_cut_k", cfg.initial_cut_k,
                  "tangents seeded per epigraph link");
  cmd->add_option("--max_root_rounds", cfg.max_root_rounds,
                  "separation rounds at the root");
  cmd->add_option("--max_cuts_per_round", cfg.max_cuts_per_round,
                  "cap on cuts added per round (0: all violated)");
  cmd->add_option("--node_sep_rounds", cfg.node_sep_rounds,
                  "separation rounds per tree node");
  cmd->add_option("--time_limit,--time-limit", cfg.time_limit,
                  "wall-clock limit in seconds");
  cmd->add_option("--node_limit", cfg.node_limit, "tree node limit");
  cmd->add_option("--best_bound", cfg.best_bound,
                  "1: best-bound node order, 0: depth-first");
  cmd->add_option("--prune_tol", cfg.prune_tol,
                  "relative bound-domination tolerance");
}

std::vector<int> parse_int_list(const std::string& text) {
  // comma-separated items, each "N" or "A..B"
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(std::stoi(item));
      continue;
    }
    int a = std::stoi(item.substr(0, dots));
    int b = std::stoi(item.substr(dots + 2));
    for (int v = a; v <= b; ++v) out.push_back(v);
  }
  if (out.empty()) throw CLI::ValidationError("empty list: " + text);
  return out;
}

struct KT {
  int k = 0, t = 0;
};

std::vector<KT> parse_kt_list(const std::string& text) {
  std::vector<KT> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto x = item.find('x');
    if (x == std::string::npos)
      throw CLI::ValidationError("expected KxT, got: " + item);
    out.push_back({std::stoi(item.substr(0, x)), std::stoi(item.substr(x + 1))});
  }
  if (out.empty()) throw CLI::ValidationError("empty list: " + text);
  return out;
}

pwcvx::FormulationKind kind_of(const std::string& word) {
  if (word == "im") return pwcvx::FormulationKind::IM;
  if (word == "mcm") return pwcvx::FormulationKind::MCM;
  if (word == "ccm") return pwcvx::FormulationKind::CCM;
  throw CLI::ValidationError("unknown formulation: " + word);
}

/// Named plot/profile functions exposed on the command line.
struct NamedFn {
  pwcvx::UnivariateFunction f;
  double lo = 0, hi = 0;
};

NamedFn named_fn(const std::string& name, std::uint64_t seed) {
  constexpr double kPi = std::numbers::pi;
  NamedFn nf;
  if (name == "neg-sin" || name == "sin") {
    pwcvx::SineTerm t{name == "sin" ? 1.0 : -1.0, 1.0, 0.0};
    nf.f.terms.push_back(t);
    nf.lo = 0;
    nf.hi = 2 * kPi;
    return nf;
  }
  if (name == "nck-trig") {
    nf.f = pwcvx::nck_trig_profile();
    nf.lo = 0;
    nf.hi = 100;
    return nf;
  }
  if (name == "logistic") {
    pwcvx::Rng rng(seed);
    pwcvx::LogisticTerm t;
    t.a = rng.uniform(0.1, 0.2);
    t.b = rng.uniform(0.0, 100.0);
    t.c = rng.uniform(0.0, 100.0);
    t.d = rng.uniform(-100.0, 0.0);
    nf.f.terms.push_back(t);
    nf.lo = 0;
    nf.hi = 100;
    return nf;
  }
  if (name.rfind("ufl-", 0) == 0 && name.size() == 5) {
    int type = name[4] - '0';
    if (type >= 1 && type <= 3) {
      pwcvx::UflInstance u = pwcvx::gen_ufl(1, 1, type, 1);
      nf.f.terms.push_back(pwcvx::SquaredCompositeTerm{u.a, u.b, u.c});
      nf.lo = 0;
      nf.hi = 1;
      return nf;
    }
  }
  throw CLI::ValidationError(
      "unknown function: " + name +
      " (expected neg-sin, sin, nck-trig, logistic, ufl-1, ufl-2, ufl-3)");
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

// ---------------------------------------------------------------------------
// Handlers
// ---------------------------------------------------------------------------

int run_solve(const std::string& path, const std::string& form, bool no_pr,
              bool no_repair, const pwcvx::SolveConfig& base,
              const std::string& out) {
  pwcvx::ProblemInstance inst = pwcvx::load_instance(path);
  pwcvx::SeparableProblem p = pwcvx::to_separable(inst);
  pwcvx::Model m = pwcvx::build_model(p, kind_of(form), !no_pr);

  pwcvx::SolveConfig cfg = base;
  if (!no_repair)
    cfg.primal_hook = [&inst](const std::vector<double>& x) {
      return std::optional<std::vector<double>>(
          pwcvx::evaluate_and_repair(inst, x).point);
    };
  pwcvx::SolveReport rep = pwcvx::branch_and_cut(m, cfg);

  std::cout << "status " << to_string(rep.status) << "\n";
  std::cout << "incumbent " << rep.incumbent_value << "\n";
  std::cout << "bound " << rep.final_bound << "\n";
  std::cout << "gap_percent " << rep.mip_gap_percent << "\n";
  std::cout << "nodes " << rep.nodes << "\n";
  std::cout << "cuts " << rep.total_cuts << " (root " << rep.root_cuts
            << ")\n";
  std::cout << "time_s " << rep.total_seconds << "\n";

  if (!out.empty()) {
    json j;
    j["formulation"] = form;
    j["strengthened"] = !no_pr;
    j["status"] = to_string(rep.status);
    j["root_bound"] = rep.root_bound;
    j["final_bound"] = rep.final_bound;
    j["incumbent_value"] = rep.incumbent_value;
    j["mip_gap_percent"] = rep.mip_gap_percent;
    j["nodes"] = rep.nodes;
    j["simplex_iterations"] = rep.simplex_iterations;
    j["root_cuts"] = rep.root_cuts;
    j["total_cuts"] = rep.total_cuts;
    j["root_rounds"] = rep.root_rounds;
    j["root_converged"] = rep.root_converged;
    j["root_seconds"] = rep.root_seconds;
    j["total_seconds"] = rep.total_seconds;
    json point = json::object();
    if (!rep.incumbent.empty())
      for (int v = 0; v < m.n_original; ++v)
        point[m.names[static_cast<std::size_t>(v)]] =
            rep.incumbent[static_cast<std::size_t>(v)];
    j["point"] = point;
    write_text(out, j.dump(2) + "\n");
  }
  return rep.status == pwcvx::SolveStatus::Infeasible ? kSolveFailure : kOk;
}

int run_relax(const std::string& path, const std::string& form, bool no_pr,
              const pwcvx::SolveConfig& cfg, const std::string& out) {
  pwcvx::ProblemInstance inst = pwcvx::load_instance(path);
  pwcvx::SeparableProblem p = pwcvx::to_separable(inst);
  pwcvx::Model m = pwcvx::build_model(p, kind_of(form), !no_pr);
  pwcvx::RootResult root = pwcvx::solve_root_relaxation(m, cfg);

  bool ok = root.lp_status == pwcvx::LpStatus::Optimal;
  std::cout << "lp_status " << (ok ? "optimal" : "failed") << "\n";
  std::cout << "bound " << root.bound << "\n";
  std::cout << "cuts " << root.cuts << "\n";
  std::cout << "rounds " << root.rounds << "\n";
  std::cout << "converged " << (root.converged ? 1 : 0) << "\n";
  std::cout << "time_s " << root.seconds << "\n";

  if (!out.empty()) {
    json j;
    j["formulation"] = form;
    j["strengthened"] = !no_pr;
    j["lp_status"] = ok ? "optimal" : "failed";
    j["bound"] = root.bound;
    j["cuts"] = root.cuts;
    j["rounds"] = root.rounds;
    j["converged"] = root.converged;
    j["seconds"] = root.seconds;
    write_text(out, j.dump(2) + "\n");
  }
  return ok ? kOk : kSolveFailure;
}

int run_compare(const std::string& family, const std::string& sizes,
                const std::string& seeds, const std::string& formulations,
                const pwcvx::SolveConfig& cfg, bool no_repair,
                const std::string& out, const std::string& runs_out) {
  pwcvx::ExperimentSpec spec;
  spec.config = cfg;
  spec.use_repair_hook = !no_repair;

  std::vector<int> seed_list = parse_int_list(seeds);
  if (family == "nck-logistic" || family == "nck-trig") {
    pwcvx::NckFamily fam = family == "nck-trig" ? pwcvx::NckFamily::Trig
                                                : pwcvx::NckFamily::Logistic;
    for (int n : parse_int_list(sizes))
      for (int sd : seed_list)
        spec.instances.push_back(
            pwcvx::gen_nck(n, fam, static_cast<std::uint64_t>(sd)));
  } else if (family.rfind("ufl-", 0) == 0 && family.size() == 5) {
    int type = family[4] - '0';
    if (type < 1 || type > 3)
      throw CLI::ValidationError("unknown family: " + family);
    for (KT kt : parse_kt_list(sizes))
      for (int sd : seed_list)
        spec.instances.push_back(
            pwcvx::gen_ufl(kt.k, kt.t, type, static_cast<std::uint64_t>(sd)));
  } else {
    throw CLI::ValidationError(
        "unknown family: " + family +
        " (expected nck-logistic, nck-trig, ufl-1, ufl-2, ufl-3)");
  }

  std::stringstream ss(formulations);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    bool plain = false;
    std::string word = tok;
    if (auto dash = word.find("-plain"); dash != std::string::npos) {
      plain = true;
      word = word.substr(0, dash);
    }
    spec.combos.push_back({kind_of(word), !plain});
  }
  if (spec.combos.empty())
    throw CLI::ValidationError("empty formulation list");

  std::vector<pwcvx::TableRow> rows = pwcvx::run_experiment(spec);
  std::string table = pwcvx::aggregate_to_csv(pwcvx::aggregate_rows(rows));
  std::cout << table;
  if (!out.empty()) write_text(out, table);
  if (!runs_out.empty()) pwcvx::write_csv(rows, runs_out);
  return kOk;
}

int run_certify(const std::string& only) {
  std::vector<int> ids;
  if (!only.empty()) ids = parse_int_list(only);
  std::vector<pwcvx::CriterionResult> results = pwcvx::run_acceptance(ids);
  bool all = true;
  for (const pwcvx::CriterionResult& r : results) {
    all = all && r.pass;
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.1f", r.seconds);
    std::cout << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << ": "
              << r.name << " (" << r.detail << ") [" << secs << " s]"
              << std::endl;
  }
  std::cout << (all ? "all criteria passed" : "criteria FAILED") << std::endl;
  return all ? kOk : kSolveFailure;
}

int run_lpsolve(const std::string& in, const std::string& out,
                const pwcvx::SolveConfig& cfg) {
  pwcvx::Model m = pwcvx::read_lp(in);
  pwcvx::SolveReport rep = pwcvx::branch_and_cut(m, cfg);
  pwcvx::LpFileSolution sol;
  sol.status = to_string(rep.status);
  bool have_inc = std::isfinite(rep.incumbent_value);
  sol.objective = have_inc ? rep.incumbent_value : rep.final_bound;
  if (have_inc)
    for (int v = 0; v < m.n_vars(); ++v)
      sol.values.emplace_back(m.names[static_cast<std::size_t>(v)],
                              rep.incumbent[static_cast<std::size_t>(v)]);
  pwcvx::write_solution(sol, out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"piecewise-convex relaxations of separable problems"};
  app.require_subcommand(1);
  int code = kOk;

  // gen
  CLI::App* gen = app.add_subcommand("gen", "generate an instance file");
  gen->require_subcommand(1);
  struct {
    int n = 10;
    std::string family = "logistic";
    std::uint64_t seed = 1;
    std::string out;
  } gn;
  CLI::App* gen_nck = gen->add_subcommand("nck", "nonlinear knapsack");
  gen_nck->add_option("--n", gn.n, "number of items");
  gen_nck->add_option("--family", gn.family, "logistic or trig");
  gen_nck->add_option("--seed", gn.seed, "generator seed");
  gen_nck->add_option("--out", gn.out, "output path (default: stdout)");
  gen_nck->callback([&] {
    pwcvx::NckFamily fam;
    if (gn.family == "logistic")
      fam = pwcvx::NckFamily::Logistic;
    else if (gn.family == "trig")
      fam = pwcvx::NckFamily::Trig;
    else
      throw CLI::ValidationError("unknown family: " + gn.family);
    pwcvx::ProblemInstance inst = pwcvx::gen_nck(gn.n, fam, gn.seed);
    if (gn.out.empty())
      std::cout << pwcvx::instance_to_json(inst) << "\n";
    else
      pwcvx::save_instance(inst, gn.out);
  });
  struct {
    int k = 3;
    int t = 6;
    int type = 1;
    std::uint64_t seed = 1;
    std::string out;
  } gu;
  CLI::App* gen_ufl = gen->add_subcommand("ufl", "flow assignment");
  gen_ufl->add_option("--k,--facilities", gu.k, "facilities");
  gen_ufl->add_option("--t,--consumers", gu.t, "consumers");
  gen_ufl->add_option("--type", gu.type, "congestion profile 1, 2 or 3");
  gen_ufl->add_option("--seed", gu.seed, "generator seed");
  gen_ufl->add_option("--out", gu.out, "output path (default: stdout)");
  gen_ufl->callback([&] {
    pwcvx::ProblemInstance inst = pwcvx::gen_ufl(gu.k, gu.t, gu.type, gu.seed);
    if (gu.out.empty())
      std::cout << pwcvx::instance_to_json(inst) << "\n";
    else
      pwcvx::save_instance(inst, gu.out);
  });

  // solve
  struct {
    std::string path;
    std::string formulation = "mcm";
    bool no_pr = false;
    bool no_repair = false;
    std::string out;
    pwcvx::SolveConfig cfg;
  } so;
  CLI::App* solve = app.add_subcommand(
      "solve", "branch-and-cut on an instance file (exit 2 when infeasible)");
  solve->add_option("instance", so.path, "instance file")->required();
  solve->add_option("--formulation", so.formulation, "im, mcm or ccm");
  solve->add_flag("--no-pr", so.no_pr, "drop the perspective strengthening");
  solve->add_flag("--no-repair", so.no_repair,
                  "disable the repair primal heuristic");
  solve->add_option("--out", so.out, "write a JSON report here");
  add_config_options(solve, so.cfg);
  solve->callback([&] {
    code = run_solve(so.path, so.formulation, so.no_pr, so.no_repair, so.cfg,
                     so.out);
  });

  // relax
  struct {
    std::string path;
    std::string formulation = "mcm";
    bool no_pr = false;
    std::string out;
    pwcvx::SolveConfig cfg;
  } rx;
  CLI::App* relax = app.add_subcommand(
      "relax", "root relaxation only: cut loop, no branching");
  relax->add_option("instance", rx.path, "instance file")->required();
  relax->add_option("--formulation", rx.formulation, "im, mcm or ccm");
  relax->add_flag("--no-pr", rx.no_pr, "drop the perspective strengthening");
  relax->add_option("--out", rx.out, "write a JSON report here");
  add_config_options(relax, rx.cfg);
  relax->callback(
      [&] { code = run_relax(rx.path, rx.formulation, rx.no_pr, rx.cfg, rx.out); });

  // compare
  struct {
    std::string family;
    std::string sizes;
    std::string seeds = "1..10";
    std::string formulations = "im,mcm";
    bool no_repair = false;
    std::string out;
    std::string runs_out;
    pwcvx::SolveConfig cfg;
  } cp;
  CLI::App* compare = app.add_subcommand(
      "compare", "run a batch and print the averaged comparison table");
  compare->add_option("--family", cp.family,
                      "nck-logistic, nck-trig, ufl-1, ufl-2 or ufl-3")
      ->required();
  compare
      ->add_option("--sizes", cp.sizes,
                   "sizes: 10,20,50 for knapsack, 3x6,6x12 for flow")
      ->required();
  compare->add_option("--seeds", cp.seeds, "seed list, e.g. 1..10 or 1,7,9");
  compare->add_option("--formulations", cp.formulations,
                      "comma list of im, mcm, ccm; add -plain for no PR");
  compare->add_flag("--no-repair", cp.no_repair,
                    "disable the repair primal heuristic");
  compare->add_option("--out", cp.out, "write the averaged CSV here");
  compare->add_option("--runs-out", cp.runs_out, "write the per-run CSV here");
  add_config_options(compare, cp.cfg);
  compare->callback([&] {
    code = run_compare(cp.family, cp.sizes, cp.seeds, cp.formulations, cp.cfg,
                       cp.no_repair, cp.out, cp.runs_out);
  });

  // profile
  struct {
    std::string fn = "neg-sin";
    int points = 101;
    std::uint64_t seed = 1;
    double cut_eps = 1e-9;
    int max_rounds = 600;
    std::string out = "profile.svg";
    std::string title;
  } pf;
  CLI::App* profile = app.add_subcommand(
      "profile", "plot a function, its relaxation and both value profiles");
  profile->add_option("--fn", pf.fn,
                      "neg-sin, sin, nck-trig, logistic, ufl-1, ufl-2, ufl-3");
  profile->add_option("--points", pf.points, "samples across the domain");
  profile->add_option("--seed", pf.seed, "seed for the logistic draw");
  profile->add_option("--cut_eps", pf.cut_eps, "profile cut tolerance");
  profile->add_option("--max_rounds", pf.max_rounds, "profile cut rounds");
  profile->add_option("--out", pf.out, "SVG output path");
  profile->add_option("--title", pf.title, "figure title (default: --fn)");
  profile->callback([&] {
    NamedFn nf = named_fn(pf.fn, pf.seed);
    pwcvx::ProfileOptions opts;
    opts.cut_eps = pf.cut_eps;
    opts.max_rounds = pf.max_rounds;
    std::string title = pf.title.empty() ? pf.fn : pf.title;
    write_text(pf.out, pwcvx::plot_relaxation_figure(nf.f, nf.lo, nf.hi,
                                                     pf.points, title, opts));
    std::cout << "wrote " << pf.out << "\n";
  });

  // certify
  struct {
    std::string only;
  } ce;
  CLI::App* certify = app.add_subcommand(
      "certify", "run the release checks (exit 2 when any fails)");
  certify->add_option("--only", ce.only, "criteria ids, e.g. 1,3 or 7..9");
  certify->callback([&] { code = run_certify(ce.only); });

  // lpsolve
  struct {
    std::string in;
    std::string out;
    pwcvx::SolveConfig cfg;
  } lp;
  CLI::App* lpsolve = app.add_subcommand(
      "lpsolve", "solve a model LP file and write a solution file");
  lpsolve->add_option("input", lp.in, "LP file")->required();
  lpsolve->add_option("output", lp.out, "solution file")->required();
  add_config_options(lpsolve, lp.cfg);
  lpsolve->callback([&] { code = run_lpsolve(lp.in, lp.out, lp.cfg); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kSolveFailure;
  }
  return code;
}
