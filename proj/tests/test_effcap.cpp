#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "fbcnoma/effcap.hpp"
#include "fbcnoma/errors.hpp"

using namespace fbcnoma;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

const FadingSpec kRayleigh100{1.0, 100.0};

}  // namespace

TEST_CASE("constant-allocation EC against high-precision quadrature") {
  // mpmath.quad over the Rayleigh density, 30 digits
  const QosSpec q{1e-3, 1e-3, 1000.0, 100.0};
  CHECK(rel(effective_capacity_constant(q, kRayleigh100, 1.0, {}).value, 5.736634968138848915775) < 1e-9);
  CHECK(rel(effective_capacity_constant(q, kRayleigh100, 1.0, {}, EcNormalization::DefOne).value,
            3.835287172486787008674) < 1e-9);
  const QosSpec q2{1e-2, 1e-6, 500.0, 100.0};
  CHECK(rel(effective_capacity_constant(q2, {2.0, 10.0}, 1.0, {}).value, 2.860187042939074028190) < 1e-9);
}

TEST_CASE("DefOne is PerUse with theta scaled by n") {
  const QosSpec a{1e-4, 1e-3, 800.0, 100.0};
  QosSpec b = a;
  b.theta = a.theta * a.blocklength;
  CHECK(rel(effective_capacity_constant(a, kRayleigh100, 2.0, {}, EcNormalization::DefOne).value,
            effective_capacity_constant(b, kRayleigh100, 2.0, {}).value) < 1e-12);
}

TEST_CASE("Monte Carlo agrees with quadrature") {
  const QosSpec q{1e-2, 1e-3, 1000.0, 100.0};
  const double quad = effective_capacity_constant(q, {2.0, 30.0}, 1.0, {}).value;
  const EcResult mc = effective_capacity_mc(q, {2.0, 30.0}, 1.0, 17, 400000);
  CHECK(mc.method == EcMethod::MonteCarlo);
  CHECK(rel(mc.value, quad) < 5e-3);
}

TEST_CASE("point-mass channel has a closed form") {
  const QosSpec q{0.05, 1e-2, 500.0, 100.0};
  const double r = achievable_rate(10.0, q);
  const double expected = -std::log(q.epsilon + (1.0 - q.epsilon) * std::exp(-q.theta * r)) / q.theta;
  CHECK(rel(effective_capacity_constant(q, FadingSpec::point_mass(10.0), 1.0, {}).value, expected) <
        1e-13);
}

TEST_CASE("small theta limit is (1 - eps) E[R+]") {
  const QosSpec q{1e-9, 1e-3, 1000.0, 100.0};
  const double mean_rate = fading_expectation(
      [&](double g) { return std::max(achievable_rate(g, q), 0.0); }, kRayleigh100, {},
      std::vector<double>{rate_zero_snr(q.blocklength, q.epsilon)});
  CHECK(rel(effective_capacity_constant(q, kRayleigh100, 1.0, {}).value, (1.0 - q.epsilon) * mean_rate) <
        1e-6);
}

TEST_CASE("epsilon at and near one") {
  QosSpec q{1e-3, 1.0, 1000.0, 100.0};
  const EcResult r = effective_capacity_constant(q, kRayleigh100, 1.0, {});
  CHECK(r.value == 0.0);
  CHECK(r.inner_expectation == 1.0);
  q.epsilon = 1.0 - 1e-9;
  CHECK(effective_capacity_constant(q, kRayleigh100, 1.0, {}).value < 1e-6);
}

TEST_CASE("EC decreases in theta") {
  QosSpec q{1e-6, 1e-3, 1000.0, 100.0};
  double prev = 1e300;
  for (double lt = -6.0; lt <= 1.0; lt += 0.5) {
    q.theta = std::pow(10.0, lt);
    const double v = effective_capacity_constant(q, kRayleigh100, 1.0, {}).value;
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("epsilon ordering depends on the normalization and on theta n") {
  // Per channel use the rate gain of a larger eps outweighs the extra
  // outage: eps = 1e-3 beats 1e-6 for theta up to 1.
  for (double theta : {1e-6, 1e-3, 0.1, 1.0}) {
    const QosSpec lo{theta, 1e-6, 1000.0, 100.0};
    const QosSpec hi{theta, 1e-3, 1000.0, 100.0};
    CAPTURE(theta);
    CHECK(effective_capacity_constant(hi, kRayleigh100, 1.0, {}).value >
          effective_capacity_constant(lo, kRayleigh100, 1.0, {}).value);
  }
  // Per block with n theta >= 100 the outage term dominates and a smaller
  // eps wins.
  for (double theta : {0.1, 1.0}) {
    const QosSpec lo{theta, 1e-6, 1000.0, 100.0};
    const QosSpec hi{theta, 1e-3, 1000.0, 100.0};
    CAPTURE(theta);
    CHECK(effective_capacity_constant(lo, kRayleigh100, 1.0, {}, EcNormalization::DefOne).value >
          effective_capacity_constant(hi, kRayleigh100, 1.0, {}, EcNormalization::DefOne).value);
  }
  // Near eps = 0.5 the outage always dominates.
  for (double theta : {1e-6, 1e-3, 0.1}) {
    const QosSpec lo{theta, 1e-6, 1000.0, 100.0};
    const QosSpec half{theta, 0.4999, 1000.0, 100.0};
    CHECK(effective_capacity_constant(lo, kRayleigh100, 1.0, {}).value >
          effective_capacity_constant(half, kRayleigh100, 1.0, {}).value);
  }
}

TEST_CASE("threshold policy meets the mean-power constraint") {
  for (double theta : {1e-6, 1e-3, 1e-2}) {
    for (double m : {0.5, 1.0, 3.0}) {
      const QosSpec q{theta, 1e-3, 1000.0, 100.0};
      const FadingSpec f{m, 100.0};
      const PowerPolicy p = solve_policy_user2(q, f, 0.1);
      CAPTURE(theta);
      CAPTURE(m);
      CHECK(std::abs(policy_mean_allocation(p, f) - 1.0) <= 1e-6);
      CHECK(p.cutoff == doctest::Approx(p.lambda / p.beta).epsilon(1e-15));
      CHECK(p.allocation(p.cutoff * 0.999) == 0.0);
      CHECK(p.power(p.cutoff * 2.0) == doctest::Approx(0.1 * p.allocation(p.cutoff * 2.0)));
    }
  }
}

TEST_CASE("policy matches the per-bin Lagrangian minimizer") {
  // Above the cutoff, nu(g) minimizes K (nu g)^-beta + lambda nu; check by
  // a fine log-grid scan.
  const QosSpec q{1e-2, 1e-3, 1000.0, 100.0};
  const PowerPolicy p = solve_policy_user2(q, kRayleigh100, 0.1);
  const double k = (1.0 - q.epsilon) * std::exp(q.theta * inv_q(q.epsilon) /
                                                 (std::sqrt(q.blocklength) * std::numbers::ln2));
  CHECK(rel(p.k_factor, k) < 1e-14);
  for (double g : {p.cutoff * 1.01, 5.0, 50.0, 300.0}) {
    if (g < p.cutoff) continue;
    double best = 0.0, best_cost = 1e300;
    for (double lv = -8.0; lv <= 6.0; lv += 1e-4) {
      const double nu = std::pow(10.0, lv);
      const double cost = k * std::pow(nu * g, -p.beta) + p.lambda * nu;
      if (cost < best_cost) {
        best_cost = cost;
        best = nu;
      }
    }
    CAPTURE(g);
    CHECK(rel(p.allocation(g), best) < 1e-3);
  }
}

TEST_CASE("policy beats constant allocation of the same mean power") {
  const QosSpec q{1e-2, 1e-3, 1000.0, 100.0};
  const PowerPolicy p = solve_policy_user2(q, kRayleigh100, 0.1);
  CHECK(effective_capacity(p, kRayleigh100, {}).value >
        effective_capacity_constant(q, kRayleigh100, 1.0, {}).value);
}

TEST_CASE("policy solver rejects epsilon outside (0, 0.5)") {
  CHECK_THROWS_AS(solve_policy_user2({1e-3, 0.6, 1000.0, 100.0}, kRayleigh100, 1.0), DomainError);
  CHECK_THROWS_AS(solve_policy_user2({1e-3, 1e-3, 1000.0, 100.0}, kRayleigh100, 0.0), DomainError);
}

TEST_CASE("user-1 policies") {
  const QosSpec q1{1e-3, 1e-3, 1000.0, 100.0};
  const QosSpec q2{1e-3, 1e-5, 1000.0, 100.0};
  const PowerPolicy perfect = solve_policy_user1(q1, {1.0, 30.0}, 1.0, SicMode::Perfect);
  CHECK(perfect.epsilon_rate == q1.epsilon);
  const PowerPolicy imperfect = solve_policy_user1(q1, {1.0, 30.0}, 1.0, SicMode::Imperfect, q2, {1.0, 5.0});
  CHECK(imperfect.epsilon == q1.epsilon);
  CHECK(imperfect.epsilon_rate == q2.epsilon);
  CHECK(std::abs(policy_mean_allocation(imperfect, {1.0, 5.0}) - 1.0) <= 1e-6);
}

TEST_CASE("decoding-order selection") {
  const QosSpec q{1e-3, 1e-3, 1000.0, 100.0};
  // Symmetric users tie; ties go to User1First.
  const OrderSelection tie = select_order({1.0, 1.0, 1.0, 1.0, 0.01}, 1.0, q, q);
  CHECK(tie.ec_order1 == doctest::Approx(tie.ec_order2).epsilon(1e-12));
  CHECK(tie.chosen == DecodingOrder::User1First);
  const OrderSelection s = select_order({1.0, 1.0, 0.2, 5.0, 0.01}, 1.0, q, q);
  CHECK((s.chosen == DecodingOrder::User2First) == (s.ec_order2 > s.ec_order1));
}

TEST_CASE("series maximum is a lower bound on the exact maximum") {
  for (double theta : {1e-6, 1e-3}) {
    for (double n : {200.0, 500.0, 1000.0, 2000.0}) {
      const QosSpec q{theta, 1e-3, n, 100.0};
      const PowerPolicy p = solve_policy_user2(q, kRayleigh100, 0.1);
      const EcResult exact = ec_max_exact(q, kRayleigh100, p, {});
      const EcResult approx = ec_max_approx(q, kRayleigh100, p);
      CAPTURE(theta);
      CAPTURE(n);
      CHECK(exact.method == EcMethod::ClosedForm);
      CHECK(approx.method == EcMethod::ClosedFormApprox);
      CHECK(approx.value <= exact.value);
      CHECK(rel(approx.value, exact.value) < 1e-3);
      CHECK(approx.warnings.empty());
    }
  }
}

TEST_CASE("series truncation converges") {
  const QosSpec q{1e-3, 1e-3, 1000.0, 100.0};
  const PowerPolicy p = solve_policy_user2(q, kRayleigh100, 0.1);
  const double a10 = ec_max_approx(q, kRayleigh100, p, 10).value;
  const double a20 = ec_max_approx(q, kRayleigh100, p, 20).value;
  const double a40 = ec_max_approx(q, kRayleigh100, p, 40).value;
  CHECK(std::abs(a40 - a20) <= std::abs(a20 - a10));
  CHECK(std::abs(a20 - a10) < 1e-5);
}

TEST_CASE("closed-form maxima validate their inputs") {
  const QosSpec q{1e-3, 1e-3, 1000.0, 100.0};
  const PowerPolicy p = solve_policy_user2(q, kRayleigh100, 0.1);
  QosSpec other = q;
  other.blocklength = 500.0;
  CHECK_THROWS_AS(ec_max_exact(other, kRayleigh100, p, {}), DomainError);
  CHECK_THROWS_AS(ec_max_approx(q, {2.0, 100.0}, p), DomainError);
  CHECK_THROWS_AS(ec_max_approx(q, kRayleigh100, p, 2), DomainError);
}

TEST_CASE("EC nondecreasing in blocklength") {
  const auto rep = lemma1_monotonicity_check({{1e-3, 1e-3}, {0.5, 1e-6}, {1e-6, 0.4}}, {1.0, 10.0});
  CHECK(rep.rows.size() == 3);
  CHECK(rep.rows[0].blocklengths.size() == 20);
  CHECK(rep.violations.empty());
}

TEST_CASE("arbitrary policies") {
  const QosSpec q{1e-3, 1e-3, 1000.0, 100.0};
  const double a = effective_capacity(q, kRayleigh100, [](double) { return 1.0; }, {}).value;
  CHECK(rel(a, effective_capacity_constant(q, kRayleigh100, 1.0, {}).value) < 1e-9);
  CHECK_THROWS_AS(effective_capacity(q, kRayleigh100, [](double) { return -1.0; }, {}), DomainError);
}
