#include "pwcvx/univariate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace pwcvx {

namespace {

struct Eval {
  double v, d1, d2;
};

Eval eval_all(const SineTerm& t, double x) {
  double u = t.omega * x + t.phase;
  double s = std::sin(u), c = std::cos(u);
  return {t.amplitude * s, t.amplitude * t.omega * c,
          -t.amplitude * t.omega * t.omega * s};
}

Eval eval_all(const CosineTerm& t, double x) {
  double u = t.omega * x + t.phase;
  double s = std::sin(u), c = std::cos(u);
  return {t.amplitude * c, -t.amplitude * t.omega * s,
          -t.amplitude * t.omega * t.omega * c};
}

Eval eval_all(const LogisticTerm& t, double x) {
  // u = b * e^{-a (x+d)}; g = c / (1+u); inflection at u = 1.
  double u = t.b * std::exp(-t.a * (x + t.d));
  if (!std::isfinite(u)) return {0.0, 0.0, 0.0};  // saturated tail
  double den = 1.0 + u;
  double v = t.c / den;
  double d1 = t.c * t.a * u / (den * den);
  double d2 = t.c * t.a * t.a * u * (u - 1.0) / (den * den * den);
  return {v, d1, d2};
}

Eval eval_all(const PolynomialTerm& t, double x) {
  double v = 0, d1 = 0, d2 = 0;
  for (int k = static_cast<int>(t.coeffs.size()) - 1; k >= 0; --k) {
    d2 = d2 * x + 2.0 * d1;
    d1 = d1 * x + v;
    v = v * x + t.coeffs[static_cast<std::size_t>(k)];
  }
  return {v, d1, d2};
}

Eval eval_all(const SquaredCompositeTerm& t, double x) {
  double s = std::sin(t.b * x), c = std::cos(t.b * x);
  double h = s + t.c * x;
  double h1 = t.b * c + t.c;
  double h2 = -t.b * t.b * s;
  return {t.a * h * h, 2.0 * t.a * h * h1, 2.0 * t.a * (h1 * h1 + h * h2)};
}

Eval eval_term(const FunctionTerm& t, double x) {
  return std::visit([x](const auto& tt) { return eval_all(tt, x); }, t);
}

}  // namespace

double term_eval(const FunctionTerm& t, double x) { return eval_term(t, x).v; }
double term_deriv(const FunctionTerm& t, double x) { return eval_term(t, x).d1; }
double term_deriv2(const FunctionTerm& t, double x) { return eval_term(t, x).d2; }

FunctionTerm term_negated(const FunctionTerm& t) {
  FunctionTerm r = t;
  std::visit(
      [](auto& tt) {
        using T = std::decay_t<decltype(tt)>;
        if constexpr (std::is_same_v<T, SineTerm> ||
                      std::is_same_v<T, CosineTerm>) {
          tt.amplitude = -tt.amplitude;
        } else if constexpr (std::is_same_v<T, LogisticTerm>) {
          tt.c = -tt.c;
        } else if constexpr (std::is_same_v<T, PolynomialTerm>) {
          for (double& c : tt.coeffs) c = -c;
        } else if constexpr (std::is_same_v<T, SquaredCompositeTerm>) {
          tt.a = -tt.a;
        }
      },
      r);
  return r;
}

double UnivariateFunction::eval(double x) const {
  double v = 0;
  for (const auto& t : terms) v += term_eval(t, x);
  return v;
}

double UnivariateFunction::deriv(double x) const {
  double v = 0;
  for (const auto& t : terms) v += term_deriv(t, x);
  return v;
}

double UnivariateFunction::deriv2(double x) const {
  double v = 0;
  for (const auto& t : terms) v += term_deriv2(t, x);
  return v;
}

UnivariateFunction UnivariateFunction::negated() const {
  UnivariateFunction r;
  r.terms.reserve(terms.size());
  for (const auto& t : terms) r.terms.push_back(term_negated(t));
  return r;
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

json term_to_json(const FunctionTerm& t) {
  return std::visit(
      [](const auto& tt) -> json {
        using T = std::decay_t<decltype(tt)>;
        if constexpr (std::is_same_v<T, SineTerm>) {
          return {{"kind", "sine"},
                  {"amplitude", tt.amplitude},
                  {"omega", tt.omega},
                  {"phase", tt.phase}};
        } else if constexpr (std::is_same_v<T, CosineTerm>) {
          return {{"kind", "cosine"},
                  {"amplitude", tt.amplitude},
                  {"omega", tt.omega},
                  {"phase", tt.phase}};
        } else if constexpr (std::is_same_v<T, LogisticTerm>) {
          return {{"kind", "logistic"},
                  {"a", tt.a},
                  {"b", tt.b},
                  {"c", tt.c},
                  {"d", tt.d}};
        } else if constexpr (std::is_same_v<T, PolynomialTerm>) {
          return {{"kind", "polynomial"}, {"coeffs", tt.coeffs}};
        } else {
          return {{"kind", "squared_composite"},
                  {"a", tt.a},
                  {"b", tt.b},
                  {"c", tt.c}};
        }
      },
      t);
}

double num_field(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw std::runtime_error(std::string("function term missing numeric '") +
                             key + "'");
  double v = j[key].get<double>();
  if (!std::isfinite(v))
    throw std::runtime_error(std::string("non-finite value for '") + key + "'");
  return v;
}

FunctionTerm term_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw std::runtime_error("function term must be an object with a 'kind'");
  std::string kind = j["kind"].get<std::string>();
  if (kind == "sine")
    return SineTerm{num_field(j, "amplitude"), num_field(j, "omega"),
                    num_field(j, "phase")};
  if (kind == "cosine")
    return CosineTerm{num_field(j, "amplitude"), num_field(j, "omega"),
                      num_field(j, "phase")};
  if (kind == "logistic")
    return LogisticTerm{num_field(j, "a"), num_field(j, "b"),
                        num_field(j, "c"), num_field(j, "d")};
  if (kind == "polynomial") {
    if (!j.contains("coeffs") || !j["coeffs"].is_array())
      throw std::runtime_error("polynomial term needs a 'coeffs' array");
    PolynomialTerm t;
    for (const auto& c : j["coeffs"]) {
      if (!c.is_number())
        throw std::runtime_error("polynomial coefficients must be numbers");
      t.coeffs.push_back(c.get<double>());
    }
    return t;
  }
  if (kind == "squared_composite")
    return SquaredCompositeTerm{num_field(j, "a"), num_field(j, "b"),
                                num_field(j, "c")};
  throw std::runtime_error("unknown function term kind '" + kind + "'");
}

}  // namespace

std::string to_json_string(const UnivariateFunction& f) {
  json arr = json::array();
  for (const auto& t : f.terms) arr.push_back(term_to_json(t));
  return arr.dump(2);
}

UnivariateFunction function_from_json(const std::string& text) {
  json j = json::parse(text);  // throws nlohmann parse_error on bad input
  if (!j.is_array())
    throw std::runtime_error("function file must be a JSON array of terms");
  UnivariateFunction f;
  for (const auto& e : j) f.terms.push_back(term_from_json(e));
  return f;
}

// ---------------------------------------------------------------------------
// Breakpoints
// ---------------------------------------------------------------------------

namespace {

int curvature_sign(double v, double zero_tol) {
  if (v > zero_tol) return 1;
  if (v < -zero_tol) return -1;
  return 0;
}

// Bisect an inflection point of f inside (a, b) where sign(f'') flips
// from sa to -sa. Zero curvature at a midpoint counts as the root.
double bisect_inflection(const UnivariateFunction& f, double a, double b,
                         int sa, double tol) {
  while (b - a > tol) {
    double m = 0.5 * (a + b);
    double vm = f.deriv2(m);
    int sm = vm > 0 ? 1 : (vm < 0 ? -1 : 0);
    if (sm == 0) return m;
    if (sm == sa)
      a = m;
    else
      b = m;
  }
  return 0.5 * (a + b);
}

double secant(const UnivariateFunction& f, double lo, double hi) {
  return (f.eval(hi) - f.eval(lo)) / (hi - lo);
}

}  // namespace

Decomposition find_breakpoints(const UnivariateFunction& f, double lo,
                               double hi, const BreakpointOptions& opts) {
  if (!(hi > lo)) throw std::invalid_argument("find_breakpoints: empty domain");
  Decomposition d;
  d.lo = lo;
  d.hi = hi;

  int n = std::max(opts.grid_n, 2);
  std::vector<double> xs(static_cast<std::size_t>(n) + 1);
  std::vector<int> sg(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    double x = lo + (hi - lo) * (static_cast<double>(k) / n);
    xs[static_cast<std::size_t>(k)] = x;
    sg[static_cast<std::size_t>(k)] = curvature_sign(f.deriv2(x), opts.zero_tol);
  }

  // Walk the scan keeping the last grid point with a definite sign; a
  // zero run between two opposite signs still yields a single bracket.
  std::vector<double> roots;
  std::vector<int> kinds;  // curvature sign per segment, in order
  int last_sign = 0;
  int last_idx = -1;
  for (int k = 0; k <= n; ++k) {
    int s = sg[static_cast<std::size_t>(k)];
    if (s == 0) continue;
    if (last_sign == 0) {
      kinds.push_back(s);
    } else if (s != last_sign) {
      roots.push_back(bisect_inflection(f, xs[static_cast<std::size_t>(last_idx)],
                                        xs[static_cast<std::size_t>(k)],
                                        last_sign, opts.root_tol));
      kinds.push_back(s);
    }
    last_sign = s;
    last_idx = k;
  }

  if (kinds.empty()) {
    d.near_linear = true;
    d.segments.push_back({lo, hi, true, secant(f, lo, hi)});
    return d;
  }

  std::vector<Segment> segs;
  double left = lo;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    double right = i < roots.size() ? roots[i] : hi;
    segs.push_back({left, right, kinds[i] > 0, 0.0});
    left = right;
  }

  // Merge degenerate slivers into the longer neighbor, then collapse any
  // adjacent pair that ended up with the same curvature.
  for (std::size_t i = 0; i < segs.size();) {
    if (segs.size() > 1 && segs[i].hi - segs[i].lo < opts.min_seg_len) {
      double left_len = i > 0 ? segs[i - 1].hi - segs[i - 1].lo : -1.0;
      double right_len =
          i + 1 < segs.size() ? segs[i + 1].hi - segs[i + 1].lo : -1.0;
      if (left_len >= right_len) {
        segs[i - 1].hi = segs[i].hi;
        segs.erase(segs.begin() + static_cast<std::ptrdiff_t>(i));
      } else {
        segs[i + 1].lo = segs[i].lo;
        segs.erase(segs.begin() + static_cast<std::ptrdiff_t>(i));
      }
    } else {
      ++i;
    }
  }
  for (std::size_t i = 1; i < segs.size();) {
    if (segs[i].convex == segs[i - 1].convex) {
      segs[i - 1].hi = segs[i].hi;
      segs.erase(segs.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }

  for (auto& s : segs) s.secant_slope = secant(f, s.lo, s.hi);
  d.segments = std::move(segs);
  return d;
}

int segment_index(const Decomposition& d, double x) {
  if (d.segments.empty()) throw std::logic_error("empty decomposition");
  double xc = std::clamp(x, d.lo, d.hi);
  int n = static_cast<int>(d.segments.size());
  for (int i = 0; i < n; ++i)
    if (xc <= d.segments[static_cast<std::size_t>(i)].hi || i == n - 1) return i;
  return n - 1;
}

double relaxed_eval(const UnivariateFunction& f, const Decomposition& d,
                    double x) {
  double xc = std::clamp(x, d.lo, d.hi);
  const Segment& s =
      d.segments[static_cast<std::size_t>(segment_index(d, xc))];
  if (s.convex) return f.eval(xc);
  return f.eval(s.lo) + s.secant_slope * (xc - s.lo);
}

}  // namespace pwcvx
