#pragma once

// epsilon-effective capacity: evaluation under arbitrary power policies,
// the optimal threshold policy with its Lagrange multiplier, decoding-order
// selection for the user pair and the closed-form maximum.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fbcnoma/channel.hpp"
#include "fbcnoma/fbc.hpp"
#include "fbcnoma/numerics.hpp"

namespace fbcnoma {

/// PerUse: -(1/theta) log E[eps + (1-eps) exp(-theta R)], R per channel use.
/// DefOne: the same with theta replaced by n * theta.
enum class EcNormalization { PerUse, DefOne };
enum class EcMethod { Quadrature, MonteCarlo, ClosedForm, ClosedFormApprox };

const char* to_string(EcNormalization n);
const char* to_string(EcMethod m);

struct EcResult {
  double value = 0.0;
  EcNormalization normalization = EcNormalization::PerUse;
  /// E[eps + (1-eps) exp(-theta R)], in [eps, 1].
  double inner_expectation = 1.0;
  EcMethod method = EcMethod::Quadrature;
  std::vector<std::string> warnings;
};

/// Threshold policy nu(g) = (beta K / lambda)^(1/(beta+1)) g^(-beta/(beta+1))
/// for g >= lambda / beta and 0 below, with
/// K = (1 - eps) exp(theta Q^-1(eps_rate) / (sqrt(n) ln 2)).
/// eps_rate differs from epsilon only for the imperfect-SIC objective.
struct PowerPolicy {
  double lambda = 1.0;
  double beta = 1.0;
  double cutoff = 1.0;
  double theta = 1.0;
  double epsilon = 1e-3;
  double epsilon_rate = 1e-3;
  double blocklength = 1000.0;
  double mean_power = 1.0;
  double k_factor = 1.0;

  /// Fraction of the mean power allocated at SNR g.
  double allocation(double gamma) const;
  /// Transmit power at SNR g, allocation(g) * mean_power.
  double power(double gamma) const { return allocation(gamma) * mean_power; }
  /// K / lambda; with it nu(g) g = (a_tilde beta g)^(1/(beta+1)).
  double a_tilde() const { return k_factor / lambda; }
  /// QoS parameters of the objective this policy optimizes.
  QosSpec rate_qos() const;
};

enum class SicMode { Perfect, Imperfect };

struct OrderSelection {
  DecodingOrder chosen = DecodingOrder::User1First;
  double ec_order1 = 0.0;
  double ec_order2 = 0.0;
};

using RateFn = std::function<double(double)>;

/// Core evaluator: -(1/t) log E[eps + (1-eps) exp(-t max(R(g), 0))] with
/// t = theta (PerUse) or blocklength * theta (DefOne). `rate` maps the
/// fading SNR to bits per channel use.
EcResult effective_capacity_rate(double theta, double epsilon,
                                 double blocklength, const RateFn& rate,
                                 const FadingSpec& fading,
                                 const QuadratureSpec& quad,
                                 EcNormalization norm = EcNormalization::PerUse,
                                 std::span<const double> breakpoints = {});

/// EC of an arbitrary policy nu(g) >= 0.
EcResult effective_capacity(const QosSpec& q, const FadingSpec& fading,
                            const ScalarFn& policy, const QuadratureSpec& quad,
                            EcNormalization norm = EcNormalization::PerUse,
                            std::span<const double> breakpoints = {});

/// EC of a solved threshold policy, under that policy's own objective.
EcResult effective_capacity(const PowerPolicy& policy, const FadingSpec& fading,
                            const QuadratureSpec& quad,
                            EcNormalization norm = EcNormalization::PerUse);

/// EC with the same allocation nu_bar in every fading state.
EcResult effective_capacity_constant(const QosSpec& q, const FadingSpec& fading,
                                     double nu_bar, const QuadratureSpec& quad,
                                     EcNormalization norm = EcNormalization::PerUse);

/// Monte Carlo counterpart of effective_capacity for a constant policy.
EcResult effective_capacity_mc(const QosSpec& q, const FadingSpec& fading,
                               double nu_bar, std::uint64_t seed,
                               std::size_t samples,
                               EcNormalization norm = EcNormalization::PerUse);

/// Threshold policy for the user decoded last (interference free). The
/// multiplier is found by bisection so that E[nu] = 1, i.e. the mean
/// transmit power equals mean_power.
PowerPolicy solve_policy_user2(const QosSpec& q, const FadingSpec& fading,
                               double mean_power);

/// Policy for the user decoded first. Perfect: same form as user 2 with
/// user-1 parameters. Imperfect: the objective is taken over the other
/// user's SNR law `fading_other`, with epsilon (q1) outside the exponential
/// and the other user's error probability (q2) inside Q^-1.
PowerPolicy solve_policy_user1(const QosSpec& q1, const FadingSpec& fading1,
                               double mean_power, SicMode mode,
                               const QosSpec& q2 = {},
                               const FadingSpec& fading_other = {});

/// Generic solver behind the two above.
PowerPolicy solve_threshold_policy(double theta, double epsilon,
                                   double epsilon_rate, double blocklength,
                                   const FadingSpec& fading, double mean_power);

/// E[nu(g)] under the fading law; equals 1 at a solved policy.
double policy_mean_allocation(const PowerPolicy& policy,
                              const FadingSpec& fading);

/// Picks the decoding order with the larger sum of the two users' EC under
/// their optimal policies. `mean_state` holds mean transmit powers and mean
/// channel gains; every SNR is Nakagami-m around the SINR the mean state
/// gives for that order. Ties go to User1First.
OrderSelection select_order(const SicScenario& mean_state, double m,
                            const QosSpec& q1, const QosSpec& q2,
                            const QuadratureSpec& quad = {});

/// Maximum EC with the high-SNR substitution 1 + nu g -> nu g applied to
/// the optimal policy, evaluated by quadrature.
EcResult ec_max_exact(const QosSpec& q, const FadingSpec& fading,
                      const PowerPolicy& policy, const QuadratureSpec& quad);

/// Series form of ec_max_exact for Rayleigh fading (m = 1), built from
/// upper incomplete gammas and the Taylor expansion of sqrt(1 - x)
/// truncated after `series_terms` terms (>= 3).
EcResult ec_max_approx(const QosSpec& q, const FadingSpec& fading,
                       const PowerPolicy& policy, int series_terms = 20);

struct MonotonicityRow {
  double theta = 0.0;
  double epsilon = 0.0;
  std::vector<double> blocklengths;
  std::vector<double> ec;
};

struct MonotonicityReport {
  std::vector<MonotonicityRow> rows;
  std::vector<std::string> violations;
};

/// EC (constant unit allocation) over n = 100, 200, ..., 2000 for every
/// (theta, epsilon) pair; records every decrease as a violation.
MonotonicityReport lemma1_monotonicity_check(
    const std::vector<std::pair<double, double>>& theta_eps,
    const FadingSpec& fading, const QuadratureSpec& quad = {});

}  // namespace fbcnoma
