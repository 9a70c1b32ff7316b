#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "doctest.h"
#include "pwcvx/external.hpp"
#include "pwcvx/formulation.hpp"
#include "pwcvx/lp_file.hpp"
#include "pwcvx/problems.hpp"
#include "pwcvx/solver.hpp"

using namespace pwcvx;

namespace {

std::vector<Model> sample_models() {
  SeparableProblem nck = to_separable(gen_nck(2, NckFamily::Trig, 61));
  SeparableProblem log2 = to_separable(gen_nck(2, NckFamily::Logistic, 62));
  SeparableProblem ufl = to_separable(gen_ufl(2, 2, 3, 63));
  std::vector<Model> out;
  out.push_back(build_im(nck, {true, true}));
  out.push_back(build_im(log2, {false, true}));
  out.push_back(build_mcm(ufl));
  out.push_back(build_ccm(nck));
  return out;
}

}  // namespace

TEST_CASE("text form is a fixed point of write and read") {
  for (const Model& m : sample_models()) {
    std::string once = write_lp_string(m);
    Model back = read_lp_string(once);
    std::string twice = write_lp_string(back);
    CHECK(once == twice);

    REQUIRE(back.n_vars() == m.n_vars());
    REQUIRE(back.rows.size() == m.rows.size());
    REQUIRE(back.terms.size() == m.terms.size());
    REQUIRE(back.blocks.size() == m.blocks.size());
    CHECK(back.kind == m.kind);
    CHECK(back.strengthened == m.strengthened);
    CHECK(back.n_original == m.n_original);
    for (int j = 0; j < m.n_vars(); ++j) {
      CHECK(back.vars[static_cast<size_t>(j)].lo ==
            m.vars[static_cast<size_t>(j)].lo);
      CHECK(back.vars[static_cast<size_t>(j)].hi ==
            m.vars[static_cast<size_t>(j)].hi);
      CHECK(back.vars[static_cast<size_t>(j)].kind ==
            m.vars[static_cast<size_t>(j)].kind);
      CHECK(back.obj[static_cast<size_t>(j)] ==
            m.obj[static_cast<size_t>(j)]);
      CHECK(back.names[static_cast<size_t>(j)] ==
            m.names[static_cast<size_t>(j)]);
    }
    for (size_t i = 0; i < m.rows.size(); ++i) {
      CHECK(back.rows[i].sense == m.rows[i].sense);
      CHECK(back.rows[i].rhs == m.rows[i].rhs);
      REQUIRE(back.rows[i].terms.size() == m.rows[i].terms.size());
      for (size_t k = 0; k < m.rows[i].terms.size(); ++k) {
        CHECK(back.rows[i].terms[k].var == m.rows[i].terms[k].var);
        CHECK(back.rows[i].terms[k].coeff == m.rows[i].terms[k].coeff);
      }
    }
    for (size_t t = 0; t < m.terms.size(); ++t) {
      CHECK(back.terms[t].anchor == m.terms[t].anchor);
      CHECK(back.terms[t].q_lo == m.terms[t].q_lo);
      CHECK(back.terms[t].q_hi == m.terms[t].q_hi);
      CHECK(back.terms[t].y == m.terms[t].y);
      CHECK(back.terms[t].z == m.terms[t].z);
      CHECK(back.terms[t].perspective == m.terms[t].perspective);
      CHECK(to_json_string(back.terms[t].g) == to_json_string(m.terms[t].g));
    }
  }
}

TEST_CASE("reread models reproduce the root relaxation") {
  SolveConfig cfg;
  cfg.max_root_rounds = 12;
  for (const Model& m : sample_models()) {
    Model back = read_lp_string(write_lp_string(m));
    RootResult a = solve_root_relaxation(m, cfg);
    RootResult b = solve_root_relaxation(back, cfg);
    REQUIRE(a.lp_status == LpStatus::Optimal);
    REQUIRE(b.lp_status == LpStatus::Optimal);
    CHECK(a.bound == doctest::Approx(b.bound).epsilon(1e-12));
    CHECK(a.rounds == b.rounds);
    CHECK(a.cuts == b.cuts);
  }
}

TEST_CASE("files carry the same bytes as strings") {
  Model m = sample_models()[0];
  std::string path = "/tmp/pwcvx_test_model.lp";
  write_lp(m, path);
  Model back = read_lp(path);
  CHECK(write_lp_string(back) == write_lp_string(m));
  std::remove(path.c_str());
}

TEST_CASE("solution files round-trip") {
  LpFileSolution sol;
  sol.status = "optimal";
  sol.objective = -12.34567890123456789;
  sol.values = {{"x0", 1.5}, {"y_0_0_1", 1.0}, {"z_0_0_1", -0.25}};
  std::string path = "/tmp/pwcvx_test_solution.sol";
  write_solution(sol, path);
  LpFileSolution back = read_solution(path);
  CHECK(back.status == sol.status);
  CHECK(back.objective == sol.objective);
  REQUIRE(back.values.size() == sol.values.size());
  for (size_t i = 0; i < sol.values.size(); ++i) {
    CHECK(back.values[i].first == sol.values[i].first);
    CHECK(back.values[i].second == sol.values[i].second);
  }
  std::remove(path.c_str());
}

#ifdef PWCVX_CLI_BINARY
TEST_CASE("external adapter matches the in-process solver") {
  ExternalSolverConfig ext;
  ext.command = std::string(PWCVX_CLI_BINARY) + " lpsolve {in} {out}";
  std::vector<SeparableProblem> problems = {
      to_separable(gen_nck(2, NckFamily::Logistic, 64)),
      to_separable(gen_nck(1, NckFamily::Trig, 65)),
  };
  for (const SeparableProblem& p : problems) {
    Model m = build_mcm(p);
    SolveReport direct = branch_and_cut(m);
    REQUIRE(direct.status == SolveStatus::Optimal);
    ExternalResult r = solve_with_external(m, ext);
    REQUIRE(r.status == "optimal");
    CHECK(std::fabs(r.objective - direct.incumbent_value) <=
          1e-6 * (1.0 + std::fabs(direct.incumbent_value)));
    REQUIRE(static_cast<int>(r.point.size()) == m.n_vars());
    CHECK(model_violation(m, r.point) <= 1e-5);
  }
}

TEST_CASE("external adapter relays infeasibility") {
  SeparableProblem p;
  p.obj = {1.0};
  p.lo = {0.0};
  p.hi = {1.0};
  ProblemRow r;
  r.linear = {{0, 1.0}};
  r.sense = RowSense::GE;
  r.rhs = 2.0;
  p.rows.push_back(r);
  Model m = build_mcm(p);
  ExternalSolverConfig ext;
  ext.command = std::string(PWCVX_CLI_BINARY) + " lpsolve {in} {out}";
  ExternalResult res = solve_with_external(m, ext);
  CHECK(res.status == "infeasible");
}
#endif

TEST_CASE("missing solver command degrades to an error status") {
  Model m = sample_models()[0];
  ExternalSolverConfig ext;
  ext.command = "/nonexistent/solver-binary {in} {out}";
  ExternalResult r = solve_with_external(m, ext);
  CHECK(r.status == "error");
  CHECK(r.point.empty());
}
