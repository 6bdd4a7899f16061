#include "fbcnoma/selftest.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "fbcnoma/channel.hpp"
#include "fbcnoma/effcap.hpp"
#include "fbcnoma/energyeff.hpp"
#include "fbcnoma/fbc.hpp"
#include "fbcnoma/numerics.hpp"
#include "fbcnoma/queuesim.hpp"

namespace fbcnoma {

namespace {

using Failures = std::vector<std::string>;

void expect(Failures& f, bool ok, const std::string& what) {
  if (!ok) f.push_back(what);
}

std::string str(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

void suite_numerics(Failures& f) {
  for (double p : {1e-12, 1e-6, 1e-3, 0.1, 0.3, 0.5, 0.7, 0.99}) {
    expect(f, rel(q_function(inv_q(p)), p) <= 1e-10, "inv_q round trip at p=" + str(p));
  }
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> us(-5.0, 5.0), ux(1e-3, 50.0);
  for (int i = 0; i < 200; ++i) {
    const double s = us(rng), x = ux(rng);
    const double lhs = upper_incomplete_gamma(s + 1.0, x);
    const double rhs = s * upper_incomplete_gamma(s, x) + std::exp(s * std::log(x) - x);
    expect(f, std::abs(lhs - rhs) <= 1e-10 * std::max(std::abs(lhs), std::abs(s * upper_incomplete_gamma(s, x))),
           "incomplete gamma recurrence at s=" + str(s) + " x=" + str(x));
  }
  for (double m : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double total = fading_expectation([](double) { return 1.0; }, {m, 3.0}, {});
    expect(f, std::abs(total - 1.0) <= 1e-9, "Nakagami density normalization at m=" + str(m));
  }
}

void suite_rate(Failures& f) {
  const double g = 100.0;
  const double c = capacity_dispersion(g).capacity;
  double prev_scaled = -1.0;
  for (double n = 1e3; n <= 1e9; n *= 10.0) {
    const double r = achievable_rate(g, n, 1e-3);
    const double scaled = (c - r) * std::sqrt(n);
    if (prev_scaled > 0.0) {
      expect(f, rel(scaled, prev_scaled) <= 1e-9, "(C - R) sqrt(n) not constant at n=" + str(n));
    }
    prev_scaled = scaled;
    expect(f, r <= c, "rate above capacity at n=" + str(n));
  }
  expect(f, std::abs(achievable_rate(g, 1e12, 1e-3) - c) <= 1e-5, "rate does not approach capacity");
}

void suite_hessian(Failures& f) {
  for (double eps : {1e-3, 1e-6}) {
    for (double n : {150.0, 500.0, 2000.0}) {
      for (double nu : {0.05, 1.0, 20.0}) {
        const Hessian2 a = hessian_F(n, nu, 1.0, eps);
        const Hessian2 d = hessian_F_numeric(n, nu, 1.0, eps);
        const double scale_nv = std::max(std::abs(a.nv), 1e-12);
        expect(f, rel(d.nn, a.nn) <= 1e-5 && rel(d.vv, a.vv) <= 1e-5 &&
                      std::abs(d.nv - a.nv) <= 1e-5 * scale_nv,
               "analytic Hessian differs from finite differences at n=" + str(n) +
                   " nu=" + str(nu) + " eps=" + str(eps));
        expect(f, a.nn > 0.0, "d2F/dn2 not positive");
        expect(f, a.nv == a.vn, "Hessian not symmetric");
      }
    }
    const double t = n_rt(1.0, 1.0, eps);
    expect(f, std::abs(n_rt_relative_residual(t, 1.0, 1.0, eps)) <= 1e-8,
           "n_rt quadratic residual at eps=" + str(eps));
  }
}

void suite_policy(Failures& f) {
  QosSpec q{1e-3, 1e-3, 1000.0, 100.0};
  const FadingSpec fading{1.0, 100.0};
  const PowerPolicy p = solve_policy_user2(q, fading, 0.1);
  expect(f, std::abs(policy_mean_allocation(p, fading) - 1.0) <= 1e-6, "mean-power residual");
  expect(f, p.allocation(0.999 * p.cutoff) == 0.0, "allocation below cutoff not zero");
  expect(f, p.allocation(p.cutoff) > 0.0, "allocation at cutoff not positive");
  PowerPolicy up = p, down = p;
  up.lambda *= 1.01;
  up.cutoff = up.lambda / up.beta;
  down.lambda *= 0.99;
  down.cutoff = down.lambda / down.beta;
  expect(f, policy_mean_allocation(up, fading) < 1.0 && policy_mean_allocation(down, fading) > 1.0,
         "mean power not decreasing in lambda");
}

void suite_ec_limits(Failures& f) {
  const FadingSpec fading{1.0, 100.0};
  QosSpec q{1e-9, 1e-3, 1000.0, 100.0};
  const double ec = effective_capacity_constant(q, fading, 1.0, {}).value;
  const double mean_rate = fading_expectation(
      [&](double g) { return std::max(achievable_rate(g, q), 0.0); }, fading, {},
      std::vector<double>{rate_zero_snr(q.blocklength, q.epsilon)});
  expect(f, rel(ec, (1.0 - q.epsilon) * mean_rate) <= 1e-4, "theta -> 0 limit");
  q.epsilon = 1.0;
  expect(f, effective_capacity_constant(q, fading, 1.0, {}).value == 0.0, "epsilon = 1 gives nonzero EC");
  q.epsilon = 1e-3;
  double prev = 1e300;
  for (double theta : {1e-6, 1e-4, 1e-2, 1.0}) {
    q.theta = theta;
    const double v = effective_capacity_constant(q, fading, 1.0, {}).value;
    expect(f, v < prev, "EC not decreasing in theta at theta=" + str(theta));
    prev = v;
  }
}

void suite_blocklength_monotonicity(Failures& f) {
  const auto rep = lemma1_monotonicity_check({{1e-3, 1e-3}, {1e-2, 1e-6}, {0.1, 0.3}}, {1.0, 30.0});
  for (const auto& v : rep.violations) f.push_back(v);
}

void suite_ee(Failures& f) {
  const FadingSpec fading{1.0, 100.0};
  PowerModel pm{1.4, 10.0, 1000.0};
  for (double n : {800.0, 1200.0}) {
    QosSpec q{1e-6, 1e-3, n, 100.0};
    const EeResult a = maximize_ee_golden(q, fading, pm, 0.1);
    const EeResult b = maximize_ee_fixed_point(q, fading, pm, 0.1);
    expect(f, rel(b.argmax_nu, a.argmax_nu) <= 1e-4,
           "golden " + str(a.argmax_nu) + " vs fixed point " + str(b.argmax_nu) + " at n=" + str(n));
    std::vector<double> ee;
    for (double nu : ee_grid(0.1, pm, 200)) ee.push_back(ee_value(nu, q, fading, pm, 0.1).value);
    expect(f, sign_changes_of_differences(ee) == 1, "EE not unimodal at n=" + str(n));
  }
}

void suite_ec_monotonicity(Failures& f) {
  const auto rep = theorem4_checks(100, 11);
  for (const auto& v : rep.violations) f.push_back(v);
  expect(f, rep.max_derivative_rel_error <= 1e-5,
         "analytic dEC/dnu differs from finite differences by " + str(rep.max_derivative_rel_error));
}

void suite_queue(Failures& f) {
  QosSpec q{1e-3, 1e-3, 1000.0, 100.0};
  const FadingSpec fading{1.0, 100.0};
  QueueSimConfig cfg;
  cfg.arrival_rate = queue_arrival_for_theta(q, fading, 1.0);
  cfg.blocks = 200000;
  cfg.seed = 3;
  cfg.thresholds = default_thresholds(q.theta);
  const auto unit = [](double) { return 1.0; };
  const TailEstimate a = simulate_queue(q, fading, unit, cfg);
  const TailEstimate b = simulate_queue(q, fading, unit, cfg);
  expect(f, a.slope == b.slope && a.mean_service == b.mean_service, "queue simulation not reproducible");
  for (std::size_t i = 1; i < a.per_threshold_probs.size(); ++i) {
    expect(f, a.per_threshold_probs[i].probability <= a.per_threshold_probs[i - 1].probability,
           "tail probabilities increase with the threshold");
  }
  cfg.arrival_rate = 0.0;
  expect(f, !simulate_queue(q, fading, unit, cfg).slope_defined, "zero arrivals give a slope");
}

}  // namespace

std::vector<SuiteOutcome> run_selftest(std::ostream& out) {
  const std::vector<std::pair<std::string, std::function<void(Failures&)>>> suites{
      {"numerics", suite_numerics},   {"rate", suite_rate},
      {"hessian", suite_hessian},     {"policy", suite_policy},
      {"ec_limits", suite_ec_limits}, {"ec_vs_blocklength", suite_blocklength_monotonicity},
      {"energy_efficiency", suite_ee}, {"ec_vs_allocation", suite_ec_monotonicity},
      {"queue", suite_queue}};
  std::vector<SuiteOutcome> results;
  for (const auto& [name, fn] : suites) {
    SuiteOutcome o;
    o.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn(o.failures);
    } catch (const std::exception& e) {
      o.failures.push_back(std::string("exception: ") + e.what());
    }
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.passed = o.failures.empty();
    out << (o.passed ? "PASS " : "FAIL ") << std::left << std::setw(18) << name << std::right
        << std::fixed << std::setprecision(2) << o.seconds << " s\n";
    for (const auto& msg : o.failures) out << "    " << msg << "\n";
    results.push_back(std::move(o));
  }
  return results;
}

}  // namespace fbcnoma
