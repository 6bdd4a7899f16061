#pragma once

// Normal-approximation rate at finite blocklength and the convexity
// machinery of the auxiliary function F(n, nu) = n * R(nu * gamma).

namespace fbcnoma {

struct QosSpec {
  /// QoS exponent theta > 0 (per bit).
  double theta = 1e-3;
  /// Target decoding error probability. Zero means the infinite
  /// blocklength reference (rate equals capacity).
  double epsilon = 1e-3;
  /// Blocklength n. Kept real because the calculus differentiates in n;
  /// integrality is enforced at the command line.
  double blocklength = 1000.0;
  double n_threshold = 100.0;

  double beta() const;
  /// theta > 0, epsilon in [0, 1], blocklength > 0.
  void validate() const;
  /// The hypotheses of the convexity and policy results:
  /// epsilon in (0, 0.5) and blocklength >= n_threshold.
  void validate_regime() const;
};

struct CapacityDispersion {
  double capacity = 0.0;
  double dispersion = 0.0;
};

struct RatePoint {
  double capacity = 0.0;
  double dispersion = 0.0;
  double rate = 0.0;
};

CapacityDispersion capacity_dispersion(double gamma);

/// log2(1+g) - sqrt(V/n) Q^-1(eps) / ln 2. Not clamped; negative at low SNR.
double achievable_rate(double gamma, double blocklength, double epsilon);
double achievable_rate(double gamma, const QosSpec& q);
RatePoint rate_point(double gamma, const QosSpec& q);

/// SNR at which the achievable rate crosses zero (0 when epsilon >= 0.5).
double rate_zero_snr(double blocklength, double epsilon);

/// F(n, nu) = n log2(1 + nu g) - sqrt(n V(nu g)) Q^-1(eps) / ln 2.
double f_function(double n, double nu, double gamma, double epsilon);

struct Hessian2 {
  double nn = 0.0;
  double nv = 0.0;
  double vn = 0.0;
  double vv = 0.0;

  double determinant() const { return nn * vv - nv * vn; }
  bool positive_definite() const { return nn > 0.0 && determinant() > 0.0; }
};

/// Analytic second partials of F with respect to (n, nu).
Hessian2 hessian_F(double n, double nu, double gamma, double epsilon);

/// Central finite-difference Hessian of f_function, for cross-checks.
Hessian2 hessian_F_numeric(double n, double nu, double gamma, double epsilon);

/// Positive root in sqrt(n) of
///   -4n + sqrt(n) Q (4/(a b) - b/a) + 3 Q^2 / a^2 = 0,
/// with a = 1 + nu g and b = sqrt(nu g (nu g + 2)).
double n_rt(double nu, double gamma, double epsilon);

/// The closed form as typeset in the original derivation, whose square-root
/// term carries 3 Q^2 instead of 3 / a^2. Kept for comparison only.
double n_rt_as_printed(double nu, double gamma, double epsilon);

/// The quadratic above evaluated at sqrt(n) = t, divided by the sum of the
/// magnitudes of its terms.
double n_rt_relative_residual(double t, double nu, double gamma,
                              double epsilon);

}  // namespace fbcnoma
