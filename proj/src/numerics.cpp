#include "fbcnoma/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "fbcnoma/errors.hpp"

namespace fbcnoma {

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;
constexpr double kTiny = 1e-300;

double std_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

// Acklam's rational approximation of the standard normal quantile;
// relative error about 1e-9, refined by Newton steps in inv_q.
double normal_quantile_guess(double p) {
  static constexpr std::array<double, 6> a{
      -3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b{
      -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01};
  static constexpr std::array<double, 6> c{
      -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> d{
      7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  auto tail = [&](double q) {
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  };
  if (p < p_low) return tail(std::sqrt(-2.0 * std::log(p)));
  if (p > 1.0 - p_low) return -tail(std::sqrt(-2.0 * std::log1p(-p)));
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r +
          a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// gamma(s, x) by its power series, s > 0.
double lower_gamma_series_sum(double s, double x) {
  double term = 1.0 / s;
  double sum = term;
  for (int k = 1; k < 100000; ++k) {
    term *= x / (s + k);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return sum;
}

// Legendre continued fraction h with Gamma(s, x) = x^s e^-x h. Valid for
// every real s when x > 0; converges quickly once x is of order one.
double upper_gamma_cf(double s, double x) {
  double b = x + 1.0 - s;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) return h;
  }
  throw ConvergenceError("upper_incomplete_gamma: continued fraction did not converge");
}

// Gamma(s0, x) for |s0| <= 1/2, 0 < x < 1, written so that s0 -> 0 is
// continuous (the limit is E1(x)).
double upper_gamma_small(double s0, double x) {
  const double lx = std::log(x);
  double head;
  if (s0 == 0.0) {
    head = -kEulerGamma - lx;
  } else {
    head = tgamma1pm1(s0) / s0 - std::expm1(s0 * lx) / s0;
  }
  // x^s0 * sum_{k>=1} (-x)^k / (k! (s0 + k))
  double term = 1.0;
  double sum = 0.0;
  for (int k = 1; k < 1000; ++k) {
    term *= -x / k;
    const double t = term / (s0 + k);
    sum += t;
    if (std::abs(t) < 1e-18 * std::max(std::abs(sum), 1e-300)) break;
  }
  return head - std::exp(s0 * lx) * sum;
}

struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendreRule make_gauss_legendre(int n) {
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      // Recompute the derivative at the converged node.
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

// Rules are immutable once built; the cache only avoids recomputation.
const GaussLegendreRule& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussLegendreRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussLegendreRule>(make_gauss_legendre(n));
  return *slot;
}

double gl_panel(const ScalarFn& f, double a, double b,
                const GaussLegendreRule& rule) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    s += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return s * half;
}

std::vector<double> segment_edges(double lo, double hi,
                                  std::span<const double> breakpoints) {
  std::vector<double> edges{lo};
  std::vector<double> inner;
  for (double bp : breakpoints) {
    if (std::isfinite(bp) && bp > lo && bp < hi) inner.push_back(bp);
  }
  std::sort(inner.begin(), inner.end());
  for (double bp : inner) {
    if (bp > edges.back()) edges.push_back(bp);
  }
  edges.push_back(hi);
  return edges;
}

double integrate_segments(const ScalarFn& f, const std::vector<double>& edges,
                          int order) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    total += integrate_panels(f, edges[i], edges[i + 1], order);
  }
  return total;
}

double refine_checked(const ScalarFn& f, const std::vector<double>& edges,
                      const QuadratureSpec& spec) {
  const double coarse = integrate_segments(f, edges, spec.node_count);
  const double fine = integrate_segments(f, edges, 2 * spec.node_count);
  const double scale = std::max(std::abs(fine), 1e-300);
  if (!std::isfinite(fine) ||
      std::abs(fine - coarse) > 10.0 * spec.relative_tolerance * scale) {
    throw ConvergenceError(
        "quadrature did not converge: node doubling changed the estimate from " +
        std::to_string(coarse) + " to " + std::to_string(fine));
  }
  return fine;
}

}  // namespace

double q_function(double x) {
  if (x == std::numeric_limits<double>::infinity()) return 0.0;
  if (x == -std::numeric_limits<double>::infinity()) return 1.0;
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double inv_q(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("inv_q: probability must lie in (0, 1), got " +
                      std::to_string(p));
  }
  if (p == 0.5) return 0.0;
  double x = -normal_quantile_guess(p);
  for (int it = 0; it < 8; ++it) {
    const double pdf = std_normal_pdf(x);
    if (pdf == 0.0) break;
    // Halley step on g(x) = Q(x) - p with g' = -phi, g'' = x phi.
    const double g = q_function(x) - p;
    const double newton = g / pdf;
    const double step = newton / (1.0 + 0.5 * x * newton);
    x += step;
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

double tgamma1pm1(double s) {
  if (std::abs(s) < 0.2) {
    // ln Gamma(1 + s) = -gamma s + sum_{k>=2} (-s)^k zeta(k) / k
    double acc = -kEulerGamma * s;
    double power = -s;
    for (int k = 2; k < 60; ++k) {
      power *= -s;
      const double t = power * std::riemann_zeta(static_cast<double>(k)) / k;
      acc += t;
      if (std::abs(t) < 1e-19) break;
    }
    return std::expm1(acc);
  }
  return std::tgamma(1.0 + s) - 1.0;
}

double upper_incomplete_gamma(double s, double x) {
  if (!(x > 0.0)) {
    throw DomainError("upper_incomplete_gamma: x must be positive, got " +
                      std::to_string(x));
  }
  if (!std::isfinite(s)) {
    throw DomainError("upper_incomplete_gamma: s must be finite");
  }
  const double prefactor_log = s * std::log(x) - x;
  if (s >= 1.0) {
    if (x < s + 1.0) {
      return std::tgamma(s) - std::exp(prefactor_log) * lower_gamma_series_sum(s, x);
    }
    return std::exp(prefactor_log) * upper_gamma_cf(s, x);
  }
  if (x >= 1.0) {
    return std::exp(prefactor_log) * upper_gamma_cf(s, x);
  }
  // s < 1, x < 1: evaluate at s0 = s - round(s) in [-1/2, 1/2] and recur
  // with Gamma(a + 1, x) = a Gamma(a, x) + x^a e^-x. Keeping |s0| <= 1/2
  // keeps every divisor of the downward steps at least 1/2 in magnitude.
  const double r = std::round(s);
  const double s0 = s - r;
  double value = upper_gamma_small(s0, x);
  if (r > 0.0) return s0 * value + std::exp(s0 * std::log(x) - x);
  const int steps = static_cast<int>(-r);
  for (int j = 1; j <= steps; ++j) {
    const double a = s0 - j;
    value = (value - std::exp(a * std::log(x) - x)) / a;
  }
  return value;
}

double regularized_lower_gamma(double s, double x) {
  if (!(s > 0.0)) throw DomainError("regularized_lower_gamma: s must be positive");
  if (x < 0.0) throw DomainError("regularized_lower_gamma: x must be nonnegative");
  if (x == 0.0) return 0.0;
  if (x == std::numeric_limits<double>::infinity()) return 1.0;
  const double log_pref = s * std::log(x) - x - std::lgamma(s);
  if (x < s + 1.0) {
    return std::exp(log_pref) * lower_gamma_series_sum(s, x);
  }
  return 1.0 - std::exp(log_pref) * upper_gamma_cf(s, x);
}

void QuadratureSpec::validate() const {
  if (node_count < 16) {
    throw DomainError("QuadratureSpec: node_count must be at least 16");
  }
  if (!(relative_tolerance > 0.0 && relative_tolerance <= 1e-3)) {
    throw DomainError("QuadratureSpec: relative_tolerance must lie in (0, 1e-3]");
  }
  if (!(upper_cutoff_multiplier > 0.0)) {
    throw DomainError("QuadratureSpec: upper_cutoff_multiplier must be positive");
  }
}

double integrate_panels(const ScalarFn& f, double a, double b, int order,
                        int uniform_panels) {
  if (!(b > a)) return 0.0;
  const auto& rule = gauss_legendre(order);
  const double h = (b - a) / uniform_panels;

  // Geometric grading of the first panel towards a.
  constexpr double kRatio = 0.15;
  constexpr int kLevels = 36;
  double total = 0.0;
  double right = a + h;
  for (int level = 0; level < kLevels; ++level) {
    const double left = a + (right - a) * kRatio;
    total += gl_panel(f, left, right, rule);
    right = left;
  }
  total += gl_panel(f, a, right, rule);

  for (int i = 1; i < uniform_panels; ++i) {
    const double left = a + i * h;
    const double r = (i + 1 == uniform_panels) ? b : a + (i + 1) * h;
    total += gl_panel(f, left, r, rule);
  }
  return total;
}

double expect_over_pdf(const ScalarFn& f, const ScalarFn& pdf, double scale,
                       const QuadratureSpec& spec,
                       std::span<const double> breakpoints) {
  spec.validate();
  if (!(scale > 0.0)) throw DomainError("expect_over_pdf: scale must be positive");
  const double hi = spec.upper_cutoff_multiplier * scale;
  const auto edges = segment_edges(0.0, hi, breakpoints);
  return refine_checked([&](double x) { return f(x) * pdf(x); }, edges, spec);
}

double integrate_checked(const ScalarFn& f, double a, double b,
                         const QuadratureSpec& spec,
                         std::span<const double> breakpoints) {
  spec.validate();
  if (!(b > a)) return 0.0;
  return refine_checked(f, segment_edges(a, b, breakpoints), spec);
}

double bisect(const ScalarFn& f, const RootBracket& bracket) {
  double lo = bracket.lo;
  double hi = bracket.hi;
  if (!(lo < hi)) throw BracketError("bisect: bracket requires lo < hi");
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (std::signbit(flo) == std::signbit(fhi)) {
    throw BracketError("bisect: f(lo) = " + std::to_string(flo) +
                       " and f(hi) = " + std::to_string(fhi) +
                       " have the same sign");
  }
  for (int it = 0; it < bracket.max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= bracket.tolerance || mid <= lo || mid >= hi) return mid;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (std::signbit(fm) == std::signbit(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  if (hi - lo <= bracket.tolerance) return 0.5 * (lo + hi);
  throw ConvergenceError("bisect: iteration limit reached with bracket width " +
                         std::to_string(hi - lo));
}

Extremum golden_section_max(const ScalarFn& f, double lo, double hi,
                            double tol) {
  if (!(hi > lo)) throw DomainError("golden_section_max: degenerate interval");
  if (!(tol > 0.0)) throw DomainError("golden_section_max: tolerance must be positive");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  const double fx = f(x);
  Extremum best{x, fx};
  if (fc > best.max) best = {c, fc};
  if (fd > best.max) best = {d, fd};
  return best;
}

}  // namespace fbcnoma
