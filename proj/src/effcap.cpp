#include "fbcnoma/effcap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "fbcnoma/errors.hpp"

namespace fbcnoma {

namespace {

constexpr double kLn2 = std::numbers::ln2;

double exponent_theta(double theta, double blocklength, EcNormalization norm) {
  return norm == EcNormalization::DefOne ? theta * blocklength : theta;
}

// Builds an EcResult from D = 1 - E[eps + (1-eps) exp(-t R)].
EcResult finish(double deficit, double t, EcNormalization norm,
                EcMethod method) {
  EcResult r;
  r.normalization = norm;
  r.method = method;
  r.inner_expectation = 1.0 - deficit;
  r.value = -std::log1p(-deficit) / t;
  return r;
}

void check_regime_epsilon(double eps, const char* who) {
  if (!(eps > 0.0 && eps < 0.5)) {
    throw DomainError(std::string(who) + ": epsilon must lie in (0, 0.5), got " +
                      std::to_string(eps));
  }
}

double c_theta(double theta, double epsilon_rate, double blocklength) {
  return theta * inv_q(epsilon_rate) / (std::sqrt(blocklength) * kLn2);
}

}  // namespace

const char* to_string(EcNormalization n) {
  return n == EcNormalization::PerUse ? "PerUse" : "DefOne";
}

const char* to_string(EcMethod m) {
  switch (m) {
    case EcMethod::Quadrature: return "Quadrature";
    case EcMethod::MonteCarlo: return "MonteCarlo";
    case EcMethod::ClosedForm: return "ClosedForm";
    case EcMethod::ClosedFormApprox: return "ClosedFormApprox";
  }
  return "?";
}

double PowerPolicy::allocation(double gamma) const {
  if (!(gamma >= cutoff) || gamma <= 0.0) return 0.0;
  const double b1 = beta + 1.0;
  return std::exp((std::log(beta * k_factor) - std::log(lambda) -
                   beta * std::log(gamma)) /
                  b1);
}

QosSpec PowerPolicy::rate_qos() const {
  QosSpec q;
  q.theta = theta;
  q.epsilon = epsilon_rate;
  q.blocklength = blocklength;
  return q;
}

EcResult effective_capacity_rate(double theta, double epsilon,
                                 double blocklength, const RateFn& rate,
                                 const FadingSpec& fading,
                                 const QuadratureSpec& quad,
                                 EcNormalization norm,
                                 std::span<const double> breakpoints) {
  if (!(theta > 0.0)) throw DomainError("effective_capacity: theta must be positive");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw DomainError("effective_capacity: epsilon must lie in [0, 1]");
  }
  const double t = exponent_theta(theta, blocklength, norm);
  if (epsilon == 1.0) {
    EcResult r;
    r.normalization = norm;
    r.method = EcMethod::Quadrature;
    return r;
  }
  // E[1 - exp(-t R+)] keeps full precision when t R is tiny.
  const auto served = [&](double g) {
    const double r = rate(g);
    return r > 0.0 ? -std::expm1(-t * r) : 0.0;
  };
  const double m = fading_expectation(served, fading, quad, breakpoints);
  const double deficit = (1.0 - epsilon) * m;
  if (deficit <= 0.5) return finish(deficit, t, norm, EcMethod::Quadrature);
  // Most of the mass is served: integrate exp(-t R+) itself so that the
  // small inner expectation keeps its relative accuracy.
  const auto unserved = [&](double g) {
    const double r = rate(g);
    return r > 0.0 ? std::exp(-t * r) : 1.0;
  };
  const double a = fading_expectation(unserved, fading, quad, breakpoints);
  EcResult res;
  res.normalization = norm;
  res.method = EcMethod::Quadrature;
  res.inner_expectation = epsilon + (1.0 - epsilon) * a;
  res.value = -std::log(res.inner_expectation) / t;
  return res;
}

EcResult effective_capacity(const QosSpec& q, const FadingSpec& fading,
                            const ScalarFn& policy, const QuadratureSpec& quad,
                            EcNormalization norm,
                            std::span<const double> breakpoints) {
  q.validate();
  if (q.epsilon == 1.0) {
    return effective_capacity_rate(q.theta, 1.0, q.blocklength,
                                   [](double) { return 0.0; }, fading, quad,
                                   norm);
  }
  const auto rate = [&](double g) {
    const double nu = policy(g);
    if (nu < 0.0) throw DomainError("effective_capacity: negative allocation");
    return achievable_rate(nu * g, q);
  };
  return effective_capacity_rate(q.theta, q.epsilon, q.blocklength, rate,
                                 fading, quad, norm, breakpoints);
}

EcResult effective_capacity(const PowerPolicy& policy, const FadingSpec& fading,
                            const QuadratureSpec& quad, EcNormalization norm) {
  const QosSpec rq = policy.rate_qos();
  const double x0 = rate_zero_snr(policy.blocklength, policy.epsilon_rate);
  // nu(g) g = (a_tilde beta g)^(1/(beta+1)) crosses x0 here.
  const double g0 = std::exp((policy.beta + 1.0) * std::log(std::max(x0, 1e-300)) -
                             std::log(policy.a_tilde() * policy.beta));
  const double bps[] = {policy.cutoff, g0};
  const auto rate = [&](double g) {
    return achievable_rate(policy.allocation(g) * g, rq);
  };
  return effective_capacity_rate(policy.theta, policy.epsilon,
                                 policy.blocklength, rate, fading, quad, norm,
                                 bps);
}

EcResult effective_capacity_constant(const QosSpec& q, const FadingSpec& fading,
                                     double nu_bar, const QuadratureSpec& quad,
                                     EcNormalization norm) {
  q.validate();
  if (!(nu_bar >= 0.0)) throw DomainError("effective_capacity: nu_bar must be >= 0");
  if (nu_bar == 0.0 || q.epsilon == 1.0) {
    return effective_capacity_rate(q.theta, 1.0, q.blocklength,
                                   [](double) { return 0.0; }, fading, quad,
                                   norm);
  }
  const double x0 = rate_zero_snr(q.blocklength, q.epsilon);
  const double bps[] = {x0 / nu_bar};
  const auto rate = [&](double g) { return achievable_rate(nu_bar * g, q); };
  return effective_capacity_rate(q.theta, q.epsilon, q.blocklength, rate,
                                 fading, quad, norm, bps);
}

EcResult effective_capacity_mc(const QosSpec& q, const FadingSpec& fading,
                               double nu_bar, std::uint64_t seed,
                               std::size_t samples, EcNormalization norm) {
  q.validate();
  const double t = exponent_theta(q.theta, q.blocklength, norm);
  const auto snr = sample_snr(fading, seed, samples);
  double acc = 0.0;
  for (double g : snr) {
    const double r = achievable_rate(nu_bar * g, q);
    if (r > 0.0) acc += -std::expm1(-t * r);
  }
  const double m = acc / static_cast<double>(samples);
  return finish((1.0 - q.epsilon) * m, t, norm, EcMethod::MonteCarlo);
}

double policy_mean_allocation(const PowerPolicy& policy,
                              const FadingSpec& fading) {
  const double bps[] = {policy.cutoff};
  return fading_expectation([&](double g) { return policy.allocation(g); },
                            fading, QuadratureSpec{}, bps);
}

PowerPolicy solve_threshold_policy(double theta, double epsilon,
                                   double epsilon_rate, double blocklength,
                                   const FadingSpec& fading,
                                   double mean_power) {
  if (!(theta > 0.0)) throw DomainError("solve_policy: theta must be positive");
  check_regime_epsilon(epsilon, "solve_policy");
  check_regime_epsilon(epsilon_rate, "solve_policy");
  if (!(blocklength > 0.0)) throw DomainError("solve_policy: blocklength must be positive");
  if (!(mean_power > 0.0)) throw DomainError("solve_policy: mean_power must be positive");
  fading.validate();

  PowerPolicy p;
  p.theta = theta;
  p.beta = theta / kLn2;
  p.epsilon = epsilon;
  p.epsilon_rate = epsilon_rate;
  p.blocklength = blocklength;
  p.mean_power = mean_power;
  p.k_factor = (1.0 - epsilon) * std::exp(c_theta(theta, epsilon_rate, blocklength));

  // Mean allocation is continuous and decreasing in lambda; search in log.
  const auto residual = [&](double u) {
    PowerPolicy trial = p;
    trial.lambda = std::exp(u);
    trial.cutoff = trial.lambda / trial.beta;
    return policy_mean_allocation(trial, fading) - 1.0;
  };
  const double step = std::log(1e3);
  double lo = std::log(1e-9 * p.beta);
  double hi = std::log(1e6 * p.beta);
  for (int i = 0; i < 20 && residual(lo) <= 0.0; ++i) lo -= step;
  for (int i = 0; i < 20 && residual(hi) >= 0.0; ++i) hi += step;
  if (residual(lo) <= 0.0 || residual(hi) >= 0.0) {
    throw InfeasibleError(
        "solve_policy: no Lagrange multiplier meets the mean-power constraint");
  }
  const double u = bisect(residual, RootBracket{lo, hi, 1e-13, 400});
  p.lambda = std::exp(u);
  p.cutoff = p.lambda / p.beta;
  const double res = policy_mean_allocation(p, fading) - 1.0;
  if (std::abs(res) > 1e-6) {
    throw InfeasibleError(
        "solve_policy: mean-power constraint cannot be met with equality "
        "(relative residual " + std::to_string(res) + ")");
  }
  return p;
}

PowerPolicy solve_policy_user2(const QosSpec& q, const FadingSpec& fading,
                               double mean_power) {
  q.validate();
  return solve_threshold_policy(q.theta, q.epsilon, q.epsilon, q.blocklength,
                                fading, mean_power);
}

PowerPolicy solve_policy_user1(const QosSpec& q1, const FadingSpec& fading1,
                               double mean_power, SicMode mode,
                               const QosSpec& q2,
                               const FadingSpec& fading_other) {
  q1.validate();
  if (mode == SicMode::Perfect) {
    return solve_threshold_policy(q1.theta, q1.epsilon, q1.epsilon,
                                  q1.blocklength, fading1, mean_power);
  }
  q2.validate();
  return solve_threshold_policy(q1.theta, q1.epsilon, q2.epsilon,
                                q1.blocklength, fading_other, mean_power);
}

OrderSelection select_order(const SicScenario& mean_state, double m,
                            const QosSpec& q1, const QosSpec& q2,
                            const QuadratureSpec& quad) {
  const auto objective = [&](DecodingOrder order) {
    const SinrPair s = sinr_pair(mean_state, order);
    const FadingSpec f1{m, s.user1};
    const FadingSpec f2{m, s.user2};
    const PowerPolicy p1 = solve_threshold_policy(
        q1.theta, q1.epsilon, q1.epsilon, q1.blocklength, f1, mean_state.p1);
    const PowerPolicy p2 = solve_threshold_policy(
        q2.theta, q2.epsilon, q2.epsilon, q2.blocklength, f2, mean_state.p2);
    return effective_capacity(p1, f1, quad).value +
           effective_capacity(p2, f2, quad).value;
  };
  OrderSelection sel;
  sel.ec_order1 = objective(DecodingOrder::User1First);
  sel.ec_order2 = objective(DecodingOrder::User2First);
  sel.chosen = sel.ec_order2 > sel.ec_order1 ? DecodingOrder::User2First
                                             : DecodingOrder::User1First;
  return sel;
}

EcResult ec_max_exact(const QosSpec& q, const FadingSpec& fading,
                      const PowerPolicy& policy, const QuadratureSpec& quad) {
  if (q.theta != policy.theta || q.blocklength != policy.blocklength ||
      q.epsilon != policy.epsilon) {
    throw DomainError("ec_max_exact: QoS parameters differ from the policy's");
  }
  const double beta = policy.beta;
  const double b1 = beta + 1.0;
  const double ct = c_theta(policy.theta, policy.epsilon_rate, policy.blocklength);
  const double ab = policy.a_tilde() * beta;
  const double eps = policy.epsilon;

  // With y = a_tilde beta g: 1 - exp(ct sqrt(1 - y^(-2/b1))) y^(-beta/b1),
  // floored at zero (the rate cannot be negative).
  const auto log_term = [&](double ly) {
    const double v = std::max(0.0, -std::expm1(-2.0 * ly / b1));
    return ct * std::sqrt(v) - beta * ly / b1;
  };
  const auto served = [&](double g) {
    if (g < policy.cutoff) return 0.0;
    return std::max(0.0, -std::expm1(log_term(std::log(ab * g))));
  };

  std::vector<double> bps{policy.cutoff, 1.0 / ab};
  // The floor releases where log_term crosses zero for some y > 1.
  double hi = 1.0;
  for (int i = 0; i < 200 && log_term(hi) >= 0.0; ++i) hi *= 2.0;
  if (log_term(hi) < 0.0 && log_term(1e-300) > 0.0) {
    const double ly = bisect(log_term, RootBracket{1e-300, hi, 1e-14, 400});
    bps.push_back(std::exp(ly) / ab);
  }

  const double m = fading_expectation(served, fading, quad, bps);
  return finish((1.0 - eps) * m, policy.theta, EcNormalization::PerUse,
                EcMethod::ClosedForm);
}

EcResult ec_max_approx(const QosSpec& q, const FadingSpec& fading,
                       const PowerPolicy& policy, int series_terms) {
  fading.validate();
  if (fading.m != 1.0) {
    throw DomainError("ec_max_approx: the series form holds for m = 1 only");
  }
  if (series_terms < 3) throw DomainError("ec_max_approx: series_terms must be >= 3");
  if (q.theta != policy.theta || q.blocklength != policy.blocklength ||
      q.epsilon != policy.epsilon) {
    throw DomainError("ec_max_approx: QoS parameters differ from the policy's");
  }
  const double beta = policy.beta;
  const double b1 = beta + 1.0;
  const double ct = c_theta(policy.theta, policy.epsilon_rate, policy.blocklength);
  const double gbar = fading.mean_snr;
  const double x = policy.cutoff / gbar;
  const double ly = std::log(policy.a_tilde() * beta * gbar);
  const double eps = policy.epsilon;

  EcResult r;
  // E[(nu g)^-beta ; g >= cutoff]
  const double eg = std::exp(-beta * ly / b1) * upper_incomplete_gamma(1.0 / b1, x);
  // Taylor expansion of sqrt(1 - u) integrated term by term.
  double tail = 1.0 - 0.5 * std::exp(-2.0 * ly / b1) *
                          upper_incomplete_gamma((beta - 1.0) / b1, x);
  double prev = 0.0;
  double last = 0.0;
  for (int l = 2; l <= series_terms; ++l) {
    const double log_coef = std::lgamma(2.0 * l - 2.0) - std::lgamma(l + 1.0) -
                            std::lgamma(l - 1.0) - (2.0 * l - 2.0) * std::log(2.0);
    const double term = std::exp(log_coef - 2.0 * l * ly / b1) *
                        upper_incomplete_gamma((beta - 2.0 * l + 1.0) / b1, x);
    tail -= term;
    prev = last;
    last = term;
  }
  if (series_terms >= 4 && std::abs(last) >= std::abs(prev)) {
    r.warnings.push_back("series terms are not decreasing; truncation may be inaccurate");
  }
  const double deficit = (1.0 - eps) * (std::exp(-x) - eg * std::exp(ct * tail));
  if (!(deficit > 0.0)) {
    r.warnings.push_back("series estimate leaves no positive service");
  }
  const EcResult base = finish(deficit, policy.theta, EcNormalization::PerUse,
                               EcMethod::ClosedFormApprox);
  r.value = base.value;
  r.normalization = base.normalization;
  r.inner_expectation = base.inner_expectation;
  r.method = base.method;
  return r;
}

MonotonicityReport lemma1_monotonicity_check(
    const std::vector<std::pair<double, double>>& theta_eps,
    const FadingSpec& fading, const QuadratureSpec& quad) {
  MonotonicityReport report;
  for (const auto& [theta, eps] : theta_eps) {
    check_regime_epsilon(eps, "lemma1_monotonicity_check");
    MonotonicityRow row{theta, eps, {}, {}};
    for (int n = 100; n <= 2000; n += 100) {
      QosSpec q{theta, eps, static_cast<double>(n), 100.0};
      row.blocklengths.push_back(n);
      row.ec.push_back(effective_capacity_constant(q, fading, 1.0, quad).value);
      const std::size_t k = row.ec.size();
      if (k >= 2 && row.ec[k - 1] < row.ec[k - 2]) {
        report.violations.push_back(
            "EC decreased from n=" + std::to_string(n - 100) + " to n=" +
            std::to_string(n) + " at theta=" + std::to_string(theta) +
            ", epsilon=" + std::to_string(eps) +
            ", mean_snr=" + std::to_string(fading.mean_snr));
      }
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace fbcnoma
