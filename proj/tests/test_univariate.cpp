#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "pwcvx/rng.hpp"
#include "pwcvx/univariate.hpp"

using namespace pwcvx;

namespace {

const double kPi = 3.14159265358979323846;

UnivariateFunction neg_sin() {
  UnivariateFunction f;
  f.terms.push_back(SineTerm{-1.0, 1.0, 0.0});
  return f;
}

UnivariateFunction pos_sin() {
  UnivariateFunction f;
  f.terms.push_back(SineTerm{1.0, 1.0, 0.0});
  return f;
}

// central differences; h tuned for ~1e-7 accuracy on smooth functions
double fd1(const UnivariateFunction& f, double x) {
  double h = 1e-5 * (1.0 + std::fabs(x));
  return (f.eval(x + h) - f.eval(x - h)) / (2 * h);
}

double fd2(const UnivariateFunction& f, double x) {
  double h = 2e-4 * (1.0 + std::fabs(x));
  return (f.eval(x + h) - 2 * f.eval(x) + f.eval(x - h)) / (h * h);
}

std::vector<UnivariateFunction> sample_functions() {
  std::vector<UnivariateFunction> fns;
  fns.push_back(neg_sin());
  {
    UnivariateFunction f;
    f.terms.push_back(CosineTerm{2.5, 0.7, 0.3});
    f.terms.push_back(SineTerm{1.2, 1.9, -1.0});
    fns.push_back(f);
  }
  {
    UnivariateFunction f;
    f.terms.push_back(LogisticTerm{0.15, 50.0, 80.0, -50.0});
    fns.push_back(f);
  }
  {
    UnivariateFunction f;
    f.terms.push_back(PolynomialTerm{{1.0, -2.0, 0.5, 0.25}});
    fns.push_back(f);
  }
  {
    UnivariateFunction f;
    f.terms.push_back(SquaredCompositeTerm{15.0, 2.0, 1.0});
    fns.push_back(f);
  }
  return fns;
}

}  // namespace

TEST_CASE("closed-form values at hand-checked points") {
  CHECK(neg_sin().eval(kPi / 2) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(neg_sin().deriv2(0.0) == doctest::Approx(0.0).epsilon(1e-12));

  UnivariateFunction lg;
  lg.terms.push_back(LogisticTerm{0.15, 50.0, 80.0, -50.0});
  CHECK(lg.eval(50.0) == doctest::Approx(80.0 / 51.0).epsilon(1e-12));

  UnivariateFunction sq;
  sq.terms.push_back(SquaredCompositeTerm{15.0, 2.0, 1.0});
  double w = 0.37;
  double h = std::sin(2 * w) + w;
  CHECK(sq.eval(w) == doctest::Approx(15.0 * h * h).epsilon(1e-12));

  UnivariateFunction poly;
  poly.terms.push_back(PolynomialTerm{{1.0, 2.0, 3.0}});
  CHECK(poly.eval(2.0) == doctest::Approx(1 + 4 + 12).epsilon(1e-12));
  CHECK(poly.deriv(2.0) == doctest::Approx(2 + 12).epsilon(1e-12));
  CHECK(poly.deriv2(2.0) == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("derivatives match finite differences on every family") {
  Rng rng(42);
  for (const auto& f : sample_functions()) {
    for (int k = 0; k < 40; ++k) {
      double x = rng.uniform(-3.0, 3.0);
      double scale = 1.0 + std::fabs(f.eval(x));
      CHECK(std::fabs(f.deriv(x) - fd1(f, x)) <= 1e-5 * scale);
      CHECK(std::fabs(f.deriv2(x) - fd2(f, x)) <= 1e-4 * scale);
    }
  }
}

TEST_CASE("negation flips values and derivatives") {
  for (const auto& f : sample_functions()) {
    UnivariateFunction n = f.negated();
    for (double x : {-1.3, 0.0, 0.7, 2.9}) {
      CHECK(n.eval(x) == doctest::Approx(-f.eval(x)).epsilon(1e-14));
      CHECK(n.deriv(x) == doctest::Approx(-f.deriv(x)).epsilon(1e-14));
      CHECK(n.deriv2(x) == doctest::Approx(-f.deriv2(x)).epsilon(1e-14));
    }
  }
}

TEST_CASE("json round trip preserves the function") {
  for (const auto& f : sample_functions()) {
    UnivariateFunction back = function_from_json(to_json_string(f));
    REQUIRE(back.terms.size() == f.terms.size());
    for (double x : {-2.0, -0.5, 0.0, 1.0, 2.5})
      CHECK(back.eval(x) == doctest::Approx(f.eval(x)).epsilon(1e-15));
  }
}

TEST_CASE("sine inflections on one period") {
  Decomposition d = find_breakpoints(neg_sin(), 0.0, 2 * kPi);
  REQUIRE(d.segments.size() == 2);
  CHECK(d.segments[0].convex);
  CHECK_FALSE(d.segments[1].convex);
  CHECK(d.segments[0].lo == doctest::Approx(0.0));
  CHECK(d.segments[0].hi == doctest::Approx(kPi).epsilon(1e-9));
  CHECK(d.segments[1].hi == doctest::Approx(2 * kPi));

  Decomposition ds = find_breakpoints(pos_sin(), 0.0, 2 * kPi);
  REQUIRE(ds.segments.size() == 2);
  CHECK_FALSE(ds.segments[0].convex);
  CHECK(ds.segments[1].convex);
}

TEST_CASE("logistic inflection matches the closed-form condition") {
  // c/(1+b e^{-a(x+d)}) inflects where b e^{-a(x+d)} = 1
  UnivariateFunction f;
  double a = 0.15, b = 50.0, c = 80.0, dd = -50.0;
  f.terms.push_back(LogisticTerm{a, b, c, dd});
  double xstar = std::log(b) / a - dd;
  REQUIRE(xstar > 0.0);
  REQUIRE(xstar < 100.0);
  Decomposition d = find_breakpoints(f, 0.0, 100.0);
  REQUIRE(d.segments.size() == 2);
  CHECK(d.segments[0].convex);
  CHECK_FALSE(d.segments[1].convex);
  CHECK(d.segments[0].hi == doctest::Approx(xstar).epsilon(1e-7));
}

TEST_CASE("segment kinds agree with a dense curvature scan") {
  std::vector<std::pair<double, double>> domains = {
      {0.0, 2 * kPi}, {-3.0, 4.0}, {0.0, 100.0}, {-2.0, 2.0}, {0.0, 1.0}};
  auto fns = sample_functions();
  for (size_t i = 0; i < fns.size(); ++i) {
    double lo = domains[i].first, hi = domains[i].second;
    Decomposition d = find_breakpoints(fns[i], lo, hi);
    REQUIRE(!d.segments.empty());
    CHECK(d.segments.front().lo == doctest::Approx(lo));
    CHECK(d.segments.back().hi == doctest::Approx(hi));
    for (size_t s = 0; s + 1 < d.segments.size(); ++s)
      CHECK(d.segments[s].hi == doctest::Approx(d.segments[s + 1].lo));
    for (int k = 0; k < 1000; ++k) {
      double x = lo + (hi - lo) * (k + 0.5) / 1000;
      int si = segment_index(d, x);
      const Segment& sg = d.segments[static_cast<size_t>(si)];
      // points within the scan resolution of a breakpoint are ambiguous
      if (x - sg.lo < 1e-4 || sg.hi - x < 1e-4) continue;
      double curv = fns[i].deriv2(x);
      if (std::fabs(curv) <= 1e-9) continue;
      CHECK(sg.convex == (curv > 0));
    }
  }
}

TEST_CASE("secant slopes recompute from the function") {
  auto fns = sample_functions();
  Decomposition d = find_breakpoints(fns[1], -3.0, 4.0);
  for (const Segment& s : d.segments) {
    double expect = (fns[1].eval(s.hi) - fns[1].eval(s.lo)) / (s.hi - s.lo);
    CHECK(s.secant_slope == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("relaxation values on one sine period") {
  Decomposition d = find_breakpoints(neg_sin(), 0.0, 2 * kPi);
  // convex piece keeps the function, concave piece takes the secant
  CHECK(relaxed_eval(neg_sin(), d, kPi / 2) ==
        doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(relaxed_eval(neg_sin(), d, 3 * kPi / 2) ==
        doctest::Approx(0.0).epsilon(1e-9));
  Decomposition ds = find_breakpoints(pos_sin(), 0.0, 2 * kPi);
  CHECK(relaxed_eval(pos_sin(), ds, kPi / 2) ==
        doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("relaxation is a continuous underestimator") {
  std::vector<std::pair<double, double>> domains = {
      {0.0, 2 * kPi}, {-3.0, 4.0}, {0.0, 100.0}, {-2.0, 2.0}, {0.0, 1.0}};
  auto fns = sample_functions();
  for (size_t i = 0; i < fns.size(); ++i) {
    double lo = domains[i].first, hi = domains[i].second;
    Decomposition d = find_breakpoints(fns[i], lo, hi);
    double span = 1.0 + std::fabs(fns[i].eval(lo)) + std::fabs(fns[i].eval(hi));
    for (int k = 0; k <= 500; ++k) {
      double x = lo + (hi - lo) * k / 500;
      double r = relaxed_eval(fns[i], d, x);
      CHECK(r <= fns[i].eval(x) + 1e-9 * span);
    }
    // equality at segment endpoints, continuity across breakpoints
    for (const Segment& s : d.segments) {
      CHECK(relaxed_eval(fns[i], d, s.lo) ==
            doctest::Approx(fns[i].eval(s.lo)).epsilon(1e-9));
      CHECK(relaxed_eval(fns[i], d, s.hi) ==
            doctest::Approx(fns[i].eval(s.hi)).epsilon(1e-9));
    }
    for (size_t s = 0; s + 1 < d.segments.size(); ++s) {
      double bp = d.segments[s].hi;
      double eps = 1e-9 * (1.0 + std::fabs(bp));
      CHECK(std::fabs(relaxed_eval(fns[i], d, bp - eps) -
                      relaxed_eval(fns[i], d, bp + eps)) <= 1e-6 * span);
    }
  }
}

TEST_CASE("near-linear functions collapse to one convex segment") {
  UnivariateFunction f;
  f.terms.push_back(PolynomialTerm{{3.0, -2.0}});
  Decomposition d = find_breakpoints(f, -5.0, 5.0);
  CHECK(d.near_linear);
  REQUIRE(d.segments.size() == 1);
  CHECK(d.segments[0].convex);
  CHECK(relaxed_eval(f, d, 1.7) == doctest::Approx(f.eval(1.7)).epsilon(1e-12));
}

TEST_CASE("segment lookup is total on the domain") {
  Decomposition d = find_breakpoints(neg_sin(), 0.0, 2 * kPi);
  CHECK(segment_index(d, -1.0) == 0);
  CHECK(segment_index(d, 0.0) == 0);
  CHECK(segment_index(d, kPi - 0.1) == 0);
  CHECK(segment_index(d, kPi + 0.1) == 1);
  CHECK(segment_index(d, 2 * kPi) == 1);
  CHECK(segment_index(d, 9.0) == 1);
}
