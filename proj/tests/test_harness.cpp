#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "pwcvx/harness.hpp"

using namespace pwcvx;

namespace {

const double kPi = 3.14159265358979323846;

int count_fields(const std::string& line) {
  int c = 1;
  for (char ch : line) c += ch == ',';
  return c;
}

TableRow synthetic_row(const std::string& family, const std::string& size,
                       std::uint64_t seed, const std::string& formulation,
                       bool strengthened, double root_gap, double final_gap,
                       const std::string& status) {
  TableRow r;
  r.family = family;
  r.size = size;
  r.seed = seed;
  r.formulation = formulation;
  r.strengthened = strengthened;
  r.status = status;
  r.root_gap_pct = root_gap;
  r.final_gap_pct = final_gap;
  r.root_cuts = 4;
  r.nodes = 8;
  r.total_time_s = 0.5;
  return r;
}

}  // namespace

TEST_CASE("experiment rows come back instance-major and consistent") {
  ExperimentSpec spec;
  spec.instances.push_back(gen_nck(2, NckFamily::Logistic, 101));
  spec.instances.push_back(gen_nck(2, NckFamily::Logistic, 102));
  spec.combos = {{FormulationKind::IM, true}, {FormulationKind::MCM, true}};
  spec.config.time_limit = 300.0;

  std::vector<TableRow> rows = run_experiment(spec);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].seed == 101);
  CHECK(rows[1].seed == 101);
  CHECK(rows[2].seed == 102);
  CHECK(rows[3].seed == 102);
  for (const TableRow& r : rows) {
    CHECK(r.family == "nck-logistic");
    CHECK(r.size == "2");
    CHECK(r.type == 0);
    CHECK(r.status == "optimal");
    CHECK(std::isfinite(r.incumbent));
    CHECK(r.final_gap_pct <= 1e-4);
    CHECK(r.root_gap_pct >= -1e-9);
    CHECK(!r.flagged);
    CHECK(r.total_time_s >= r.root_time_s);
  }
  CHECK(rows[0].formulation == "im");
  CHECK(rows[1].formulation == "mcm");
  // the choice model relaxes no tighter than it must
  CHECK(rows[1].root_bound >= rows[0].root_bound - 1e-7);
  CHECK(rows[3].root_bound >= rows[2].root_bound - 1e-7);
}

TEST_CASE("empty combo list expands to the standard four") {
  ExperimentSpec spec;
  spec.instances.push_back(gen_nck(1, NckFamily::Logistic, 55));
  spec.config.time_limit = 300.0;
  std::vector<TableRow> rows = run_experiment(spec);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].formulation == "im");
  CHECK(rows[0].strengthened);
  CHECK(rows[1].formulation == "im");
  CHECK(!rows[1].strengthened);
  CHECK(rows[2].formulation == "mcm");
  CHECK(rows[3].formulation == "ccm");
}

TEST_CASE("per-run table serializes with a stable header") {
  std::vector<TableRow> rows = {
      synthetic_row("nck-trig", "3", 7, "im", true, 1.25, 0.0, "optimal")};
  rows[0].flagged = true;
  std::string csv = rows_to_csv(rows);
  std::istringstream in(csv);
  std::string header, line;
  REQUIRE(std::getline(in, header));
  CHECK(header ==
        "family,size,type,seed,formulation,strengthened,status,root_bound,"
        "final_bound,incumbent,root_gap_pct,final_gap_pct,root_cuts,"
        "total_cuts,nodes,root_time_s,total_time_s,flagged");
  REQUIRE(std::getline(in, line));
  CHECK(count_fields(line) == count_fields(header));
  CHECK(line.substr(line.size() - 2) == ",1");
  CHECK(line.rfind("nck-trig,3,0,7,im,1,optimal,", 0) == 0);

  std::string path = "/tmp/pwcvx_test_rows.csv";
  write_csv(rows, path);
  std::ifstream f(path);
  std::stringstream buf;
  buf << f.rdbuf();
  CHECK(buf.str() == csv);
  std::remove(path.c_str());
}

TEST_CASE("aggregation reproduces exact means in first-appearance order") {
  std::vector<TableRow> rows;
  rows.push_back(synthetic_row("nck-trig", "3", 1, "im", true, 1.5, 0.5,
                               "optimal"));
  rows.push_back(synthetic_row("nck-trig", "3", 1, "mcm", true, 0.5, 0.25,
                               "optimal"));
  rows.push_back(synthetic_row("nck-trig", "3", 2, "im", true, 2.5, 0.75,
                               "time_limit"));
  rows.push_back(synthetic_row("nck-trig", "3", 2, "mcm", true, 1.5, 0.25,
                               "optimal"));
  rows.push_back(synthetic_row("nck-trig", "3", 2, "im", false, 3.5, 1.25,
                               "optimal"));
  rows.push_back(synthetic_row("ufl", "2x3", 9, "im", true, 4.0, 1.0,
                               "optimal"));

  std::vector<AggregateRow> agg = aggregate_rows(rows);
  REQUIRE(agg.size() == 2);
  CHECK(agg[0].family == "nck-trig");
  CHECK(agg[0].size == "3");
  CHECK(agg[0].instances == 2);
  REQUIRE(agg[0].cells.size() == 3);
  CHECK(agg[0].cells[0].formulation == "im");
  CHECK(agg[0].cells[1].formulation == "mcm");
  CHECK(agg[0].cells[2].formulation == "im-plain");
  CHECK(agg[0].cells[0].solved == 1);
  CHECK(agg[0].cells[1].solved == 2);
  CHECK(agg[0].cells[2].solved == 1);
  CHECK(agg[0].cells[0].mean_root_gap_pct == 2.0);  // (1.5 + 2.5) / 2
  CHECK(agg[0].cells[1].mean_final_gap_pct == 0.25);
  CHECK(agg[0].cells[2].mean_root_gap_pct == 3.5);
  CHECK(agg[0].cells[0].mean_nodes == 8.0);
  CHECK(agg[1].family == "ufl");
  REQUIRE(agg[1].cells.size() == 1);
  CHECK(agg[1].cells[0].formulation == "im");
  CHECK(agg[1].cells[0].solved == 1);

  // column labels come from the first group's cells
  std::string csv = aggregate_to_csv(agg);
  CHECK(csv.rfind("family,size,type,instances", 0) == 0);
  CHECK(csv.find("im_plain_solved") != std::string::npos);
  CHECK(csv.find("nck-trig,3,0,2,1,") != std::string::npos);
}

TEST_CASE("line plots are deterministic and break on non-finite samples") {
  std::vector<double> xs = {0.0, 1.0, 2.0, 3.0};
  PlotSeries a;
  a.label = "first series";
  a.ys = {0.0, 1.0, std::nan(""), 0.5};
  PlotSeries b;
  b.label = "second series";
  b.ys = {1.0, 0.5, 0.25, 0.125};
  b.dashed = true;
  std::string one = plot_profiles(xs, {a, b}, "demo title", "load", "value");
  std::string two = plot_profiles(xs, {a, b}, "demo title", "load", "value");
  CHECK(one == two);
  CHECK(one.rfind("<svg", 0) == 0);
  CHECK(one.find("first series") != std::string::npos);
  CHECK(one.find("second series") != std::string::npos);
  CHECK(one.find("demo title") != std::string::npos);
  CHECK(one.find("load") != std::string::npos);
  CHECK(one.find("stroke-dasharray") != std::string::npos);

  // same series without the hole: strictly fewer path segments
  PlotSeries c = a;
  c.ys[2] = 0.75;
  std::string whole = plot_profiles(xs, {c}, "demo title", "load", "value");
  std::string holed = plot_profiles(xs, {a}, "demo title", "load", "value");
  auto count_lines = [](const std::string& svg) {
    size_t n = 0, pos = 0;
    while ((pos = svg.find("<polyline", pos)) != std::string::npos) {
      ++n;
      pos += 9;
    }
    return n;
  };
  CHECK(count_lines(holed) > count_lines(whole));
}

TEST_CASE("relaxation figure carries all four curves") {
  UnivariateFunction f;
  f.terms.push_back(SineTerm{-1.0, 1.0, 0.0});
  ProfileOptions opts;
  opts.cut_eps = 1e-6;
  opts.max_rounds = 80;
  std::string one = plot_relaxation_figure(f, 0.0, 2 * kPi, 9, "neg sine",
                                           opts);
  std::string two = plot_relaxation_figure(f, 0.0, 2 * kPi, 9, "neg sine",
                                           opts);
  CHECK(one == two);
  CHECK(one.find("incremental relaxation") != std::string::npos);
  CHECK(one.find("multiple-choice relaxation") != std::string::npos);
  CHECK(one.find("relaxed g") != std::string::npos);
  CHECK(one.find("neg sine") != std::string::npos);
}
