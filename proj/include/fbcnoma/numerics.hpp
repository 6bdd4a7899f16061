#pragma once

// Special functions, quadrature and scalar root/extremum search.
// Nothing in here knows about channels or queues.

#include <cstdint>
#include <functional>
#include <span>

namespace fbcnoma {

using ScalarFn = std::function<double(double)>;

/// Standard Gaussian tail probability Q(x) = P(Z > x).
double q_function(double x);

/// Inverse of q_function on (0, 1). Throws DomainError outside.
double inv_q(double p);

/// Upper incomplete gamma function Gamma(s, x) (not regularized) for any
/// real s and x > 0. Negative s is reached by downward recurrence
/// for small x and by the Legendre continued fraction otherwise.
double upper_incomplete_gamma(double s, double x);

/// Regularized lower incomplete gamma P(s, x), s > 0, x >= 0.
double regularized_lower_gamma(double s, double x);

/// Gamma(1 + s) - 1 without cancellation for small |s|.
double tgamma1pm1(double s);

struct QuadratureSpec {
  /// Gauss-Legendre order of every panel.
  int node_count = 24;
  double relative_tolerance = 1e-10;
  /// Semi-infinite integrals are truncated at multiplier * scale.
  double upper_cutoff_multiplier = 40.0;

  void validate() const;
};

/// Integrates f over [a, b] with composite Gauss-Legendre panels of the
/// given order. The panel touching `a` is geometrically graded so that
/// integrable endpoint singularities (x^-1/2 and the like) converge.
double integrate_panels(const ScalarFn& f, double a, double b, int order,
                        int uniform_panels = 32);

/// E[f(X)] for a density `pdf` supported on [0, inf) with characteristic
/// scale `scale` (the mean, for Nakagami SNRs). The range is truncated at
/// spec.upper_cutoff_multiplier * scale and split at `breakpoints` (kinks
/// or jumps of the integrand). Every estimate is repeated with twice the
/// node count; if the two disagree by more than 10 x relative_tolerance a
/// ConvergenceError is thrown.
double expect_over_pdf(const ScalarFn& f, const ScalarFn& pdf, double scale,
                       const QuadratureSpec& spec,
                       std::span<const double> breakpoints = {});

/// Same refinement check as expect_over_pdf for a plain integral on [a, b].
double integrate_checked(const ScalarFn& f, double a, double b,
                         const QuadratureSpec& spec,
                         std::span<const double> breakpoints = {});

struct RootBracket {
  double lo = 0.0;
  double hi = 1.0;
  double tolerance = 1e-12;
  int max_iterations = 200;
};

/// Bisection. Throws BracketError when f(lo), f(hi) share a sign and
/// ConvergenceError when max_iterations is exhausted before the bracket
/// shrinks below tolerance.
double bisect(const ScalarFn& f, const RootBracket& bracket);

struct Extremum {
  double argmax = 0.0;
  double max = 0.0;
};

/// Golden-section search for the maximum of a strictly quasi-concave f.
Extremum golden_section_max(const ScalarFn& f, double lo, double hi,
                            double tol);

}  // namespace fbcnoma
