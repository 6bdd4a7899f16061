#include "fbcnoma/fbc.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fbcnoma/errors.hpp"
#include "fbcnoma/numerics.hpp"

namespace fbcnoma {

namespace {

constexpr double kLn2 = std::numbers::ln2;

void require_regime_epsilon(double epsilon, const char* who) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw DomainError(std::string(who) + ": epsilon must lie in (0, 0.5), got " +
                      std::to_string(epsilon));
  }
}

struct AB {
  double a;
  double b;
  double d;  // 4/(a b) - b/a
};

AB ab_terms(double nu, double gamma) {
  const double x = nu * gamma;
  if (!(x > 0.0)) throw DomainError("n_rt: nu * gamma must be positive");
  const double a = 1.0 + x;
  const double b = std::sqrt(x * (x + 2.0));
  return {a, b, 4.0 / (a * b) - b / a};
}

}  // namespace

double QosSpec::beta() const { return theta / kLn2; }

void QosSpec::validate() const {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw DomainError("QosSpec: theta must be positive and finite");
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw DomainError("QosSpec: epsilon must lie in [0, 1], got " +
                      std::to_string(epsilon));
  }
  if (!(blocklength > 0.0) || !std::isfinite(blocklength)) {
    throw DomainError("QosSpec: blocklength must be positive");
  }
  if (!(n_threshold > 0.0)) {
    throw DomainError("QosSpec: n_threshold must be positive");
  }
}

void QosSpec::validate_regime() const {
  validate();
  require_regime_epsilon(epsilon, "QosSpec");
  if (blocklength < n_threshold) {
    throw DomainError("QosSpec: blocklength " + std::to_string(blocklength) +
                      " is below n_threshold " + std::to_string(n_threshold));
  }
}

CapacityDispersion capacity_dispersion(double gamma) {
  if (!(gamma >= 0.0)) throw DomainError("capacity_dispersion: gamma must be >= 0");
  const double inv = 1.0 / (1.0 + gamma);
  // 1 - inv^2 = gamma (gamma + 2) inv^2 avoids cancellation near 0.
  return {std::log1p(gamma) / kLn2, gamma * (gamma + 2.0) * inv * inv};
}

double achievable_rate(double gamma, double blocklength, double epsilon) {
  if (!(blocklength > 0.0)) throw DomainError("achievable_rate: blocklength must be positive");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw DomainError("achievable_rate: epsilon must lie in [0, 1)");
  }
  const auto cd = capacity_dispersion(gamma);
  if (epsilon == 0.0) return cd.capacity;
  return cd.capacity -
         std::sqrt(cd.dispersion / blocklength) * inv_q(epsilon) / kLn2;
}

double achievable_rate(double gamma, const QosSpec& q) {
  return achievable_rate(gamma, q.blocklength, q.epsilon);
}

RatePoint rate_point(double gamma, const QosSpec& q) {
  const auto cd = capacity_dispersion(gamma);
  return {cd.capacity, cd.dispersion, achievable_rate(gamma, q)};
}

double rate_zero_snr(double blocklength, double epsilon) {
  if (epsilon == 0.0 || epsilon >= 0.5) return 0.0;
  const double qinv = inv_q(epsilon);
  // For small x, R(x) ~ (x - sqrt(2x/n) Q) / ln 2, so the root is near 2Q^2/n.
  const auto r = [&](double x) { return achievable_rate(x, blocklength, epsilon); };
  double hi = std::max(4.0 * qinv * qinv / blocklength, 1e-300);
  while (r(hi) <= 0.0) hi *= 2.0;
  const double lo = hi * 1e-6;
  if (r(lo) >= 0.0) return lo;
  return bisect(r, RootBracket{lo, hi, hi * 1e-15, 400});
}

double f_function(double n, double nu, double gamma, double epsilon) {
  return n * achievable_rate(nu * gamma, n, epsilon);
}

Hessian2 hessian_F(double n, double nu, double gamma, double epsilon) {
  if (!(n > 0.0 && nu > 0.0 && gamma > 0.0)) {
    throw DomainError("hessian_F: n, nu and gamma must be positive");
  }
  const double q = epsilon == 0.0 ? 0.0 : inv_q(epsilon);
  const double x = nu * gamma;
  const double a = 1.0 + x;
  const double b = std::sqrt(x * (x + 2.0));
  const double sqrt_v = b / a;
  const double sn = std::sqrt(n);

  Hessian2 h;
  h.nn = sqrt_v * q / (4.0 * kLn2 * n * sn);
  h.nv = gamma / (a * kLn2) - q / (2.0 * sn * kLn2) * gamma / (a * a * b);
  h.vn = h.nv;
  h.vv = -n * gamma * gamma / (a * a * kLn2) +
         q * sn / kLn2 * gamma * gamma * (3.0 * x * x + 6.0 * x + 1.0) /
             (a * a * a * b * b * b);
  return h;
}

Hessian2 hessian_F_numeric(double n, double nu, double gamma, double epsilon) {
  const auto f = [&](double nn, double vv) {
    return f_function(nn, vv, gamma, epsilon);
  };
  const double f0 = f(n, nu);
  const auto central = [&](double hn, double hv) {
    Hessian2 h;
    h.nn = (f(n + hn, nu) - 2.0 * f0 + f(n - hn, nu)) / (hn * hn);
    h.vv = (f(n, nu + hv) - 2.0 * f0 + f(n, nu - hv)) / (hv * hv);
    h.nv = (f(n + hn, nu + hv) - f(n + hn, nu - hv) - f(n - hn, nu + hv) +
            f(n - hn, nu - hv)) /
           (4.0 * hn * hv);
    h.vn = h.nv;
    return h;
  };
  // One Richardson step removes the O(h^2) term.
  const double hn = 1e-2 * n;
  const double hv = 1e-2 * nu;
  const Hessian2 coarse = central(hn, hv);
  const Hessian2 fine = central(0.5 * hn, 0.5 * hv);
  const auto extrapolate = [](double c, double f) { return (4.0 * f - c) / 3.0; };
  Hessian2 h;
  h.nn = extrapolate(coarse.nn, fine.nn);
  h.nv = extrapolate(coarse.nv, fine.nv);
  h.vn = h.nv;
  h.vv = extrapolate(coarse.vv, fine.vv);
  return h;
}

double n_rt(double nu, double gamma, double epsilon) {
  require_regime_epsilon(epsilon, "n_rt");
  const double q = inv_q(epsilon);
  const auto t = ab_terms(nu, gamma);
  return q / 8.0 * t.d +
         q / 2.0 * std::sqrt(t.d * t.d / 16.0 + 3.0 / (t.a * t.a));
}

double n_rt_as_printed(double nu, double gamma, double epsilon) {
  require_regime_epsilon(epsilon, "n_rt_as_printed");
  const double q = inv_q(epsilon);
  const auto t = ab_terms(nu, gamma);
  return q / 8.0 * t.d + q / 2.0 * std::sqrt(t.d * t.d / 16.0 + 3.0 * q * q);
}

double n_rt_relative_residual(double t, double nu, double gamma,
                              double epsilon) {
  require_regime_epsilon(epsilon, "n_rt_relative_residual");
  const double q = inv_q(epsilon);
  const auto ab = ab_terms(nu, gamma);
  const double t1 = -4.0 * t * t;
  const double t2 = t * q * ab.d;
  const double t3 = 3.0 * q * q / (ab.a * ab.a);
  return (t1 + t2 + t3) / (std::abs(t1) + std::abs(t2) + std::abs(t3));
}

}  // namespace fbcnoma
