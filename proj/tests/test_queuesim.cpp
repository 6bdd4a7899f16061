#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "fbcnoma/errors.hpp"
#include "fbcnoma/queuesim.hpp"

using namespace fbcnoma;

namespace {

const FadingSpec kRayleigh100{1.0, 100.0};
const auto kUnit = [](double) { return 1.0; };

QueueSimConfig base_config(double theta, double arrival, std::int64_t blocks) {
  QueueSimConfig c;
  c.arrival_rate = arrival;
  c.blocks = blocks;
  c.seed = 9;
  c.thresholds = default_thresholds(theta);
  return c;
}

}  // namespace

TEST_CASE("default thresholds") {
  const auto th = default_thresholds(1e-3, 30, 15.0);
  CHECK(th.size() == 30);
  CHECK(th.front() == doctest::Approx(500.0));
  CHECK(th.back() == doctest::Approx(15000.0));
  CHECK_THROWS_AS(default_thresholds(0.0), DomainError);
}

TEST_CASE("config validation") {
  QueueSimConfig c = base_config(1e-3, 1.0, 1000);
  CHECK_THROWS_AS(c.validate(), DomainError);
  c.blocks = 200000;
  CHECK_NOTHROW(c.validate());
  c.thresholds = {2.0, 1.0};
  CHECK_THROWS_AS(c.validate(), DomainError);
  c.thresholds = {1.0, 2.0};
  c.arrival_rate = -1.0;
  CHECK_THROWS_AS(c.validate(), DomainError);
}

TEST_CASE("arrival rate is n times the per-block EC") {
  const QosSpec q{1e-3, 1e-3, 1000.0, 100.0};
  const double a = queue_arrival_for_theta(q, kRayleigh100, 1.0);
  // mpmath: DefOne EC 3.835287172486787 bits per channel use
  CHECK(a == doctest::Approx(1000.0 * 3.835287172486787).epsilon(1e-9));
}

TEST_CASE("deterministic given the seed") {
  const QosSpec q{1e-3, 1e-3, 1000.0, 100.0};
  const QueueSimConfig c = base_config(q.theta, queue_arrival_for_theta(q, kRayleigh100, 1.0), 300000);
  const TailEstimate a = simulate_queue(q, kRayleigh100, kUnit, c);
  const TailEstimate b = simulate_queue(q, kRayleigh100, kUnit, c);
  CHECK(a.slope == b.slope);
  CHECK(a.max_queue == b.max_queue);
  QueueSimConfig d = c;
  d.seed = 10;
  CHECK(simulate_queue(q, kRayleigh100, kUnit, d).mean_service != a.mean_service);
}

TEST_CASE("mean service matches the expected rate") {
  const QosSpec q{1e-3, 1e-3, 1000.0, 100.0};
  const QueueSimConfig c = base_config(q.theta, 1.0, 400000);
  const TailEstimate e = simulate_queue(q, kRayleigh100, kUnit, c);
  const double expected =
      (1.0 - q.epsilon) * q.blocklength *
      fading_expectation([&](double g) { return std::max(achievable_rate(g, q), 0.0); }, kRayleigh100, {},
                         std::vector<double>{rate_zero_snr(q.blocklength, q.epsilon)});
  // per-block service has std ~ 2.3 kbit; standard error ~ 3.6 bits
  CHECK(std::abs(e.mean_service - expected) < 25.0);
}

TEST_CASE("tail probabilities are monotone and decay near theta") {
  const QosSpec q{1e-3, 1e-3, 1000.0, 100.0};
  const QueueSimConfig c = base_config(q.theta, queue_arrival_for_theta(q, kRayleigh100, 1.0), 2000000);
  const TailEstimate e = simulate_queue(q, kRayleigh100, kUnit, c);
  REQUIRE(e.slope_defined);
  for (std::size_t i = 1; i < e.per_threshold_probs.size(); ++i) {
    CHECK(e.per_threshold_probs[i].probability <= e.per_threshold_probs[i - 1].probability);
  }
  CHECK(e.thresholds_used >= 5);
  CHECK(e.fit_r2 > 0.95);
  CHECK(e.slope_stderr > 0.0);
  CHECK(std::abs(e.slope - q.theta) / q.theta < 0.3);
}

TEST_CASE("lower arrivals give a steeper tail") {
  const QosSpec q{1e-3, 1e-3, 1000.0, 100.0};
  const double a = queue_arrival_for_theta(q, kRayleigh100, 1.0);
  QueueSimConfig c = base_config(q.theta, 0.98 * a, 1000000);
  c.thresholds = default_thresholds(q.theta, 20, 8.0);
  const TailEstimate low = simulate_queue(q, kRayleigh100, kUnit, c);
  REQUIRE(low.slope_defined);
  CHECK(low.slope >= q.theta * (1.0 - 0.15));
}

TEST_CASE("zero arrivals leave the slope undefined") {
  const QosSpec q{1e-3, 1e-3, 1000.0, 100.0};
  const TailEstimate e = simulate_queue(q, kRayleigh100, kUnit, base_config(q.theta, 0.0, 100000));
  CHECK_FALSE(e.slope_defined);
  CHECK(e.max_queue == 0.0);
}

TEST_CASE("overload is reported as instability") {
  const QosSpec q{1e-3, 1e-3, 1000.0, 100.0};
  CHECK_THROWS_AS(simulate_queue(q, kRayleigh100, kUnit, base_config(q.theta, 1e5, 100000)),
                  InstabilityError);
}

TEST_CASE("too few exceedances") {
  const QosSpec q{1e-3, 1e-3, 1000.0, 100.0};
  QueueSimConfig c = base_config(q.theta, 0.5 * queue_arrival_for_theta(q, kRayleigh100, 1.0), 100000);
  c.thresholds = {1.0, 1e6, 2e6};
  c.min_exceedances = 50;
  CHECK_THROWS_AS(simulate_queue(q, kRayleigh100, kUnit, c), InsufficientEventsError);
}

TEST_CASE("non-fading channel with decoding errors") {
  // Service is n R w.p. 1 - eps and 0 otherwise; the tail slope solves
  // eps e^{s a} + (1 - eps) e^{s (a - n R)} = 1.
  const QosSpec q{2e-3, 0.05, 500.0, 100.0};
  const FadingSpec f = FadingSpec::point_mass(10.0);
  const double a = queue_arrival_for_theta(q, f, 1.0);
  QueueSimConfig c = base_config(q.theta, a, 2000000);
  const TailEstimate e = simulate_queue(q, f, kUnit, c);
  REQUIRE(e.slope_defined);
  CHECK(std::abs(e.slope - q.theta) / q.theta < 0.15);
}
