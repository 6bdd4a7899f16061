#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>

#include "fbcnoma/channel.hpp"
#include "fbcnoma/errors.hpp"

using namespace fbcnoma;

TEST_CASE("SINR under both decoding orders") {
  const SicScenario s{2.0, 3.0, 0.5, 4.0, 0.1};
  const SinrPair a = sinr_pair(s, DecodingOrder::User1First);
  CHECK(a.user1 == doctest::Approx(1.0 / (12.0 + 0.1)));
  CHECK(a.user2 == doctest::Approx(12.0 / 0.1));
  const SinrPair b = sinr_pair(s, DecodingOrder::User2First);
  CHECK(b.user2 == doctest::Approx(12.0 / (1.0 + 0.1)));
  CHECK(b.user1 == doctest::Approx(1.0 / 0.1));
  const SinrPair c = sinr_pair(s, DecodingOrder::User2First, SecondUserSinr::AsPrinted);
  CHECK(c.user1 == doctest::Approx(1.0 / (1.0 + 0.1)));
  CHECK(c.user2 == doctest::Approx(b.user2));
}

TEST_CASE("SINR rejects nonpositive state") {
  CHECK_THROWS_AS(sinr_pair({0.0, 1.0, 1.0, 1.0, 1.0}, DecodingOrder::User1First), DomainError);
  CHECK_THROWS_AS(sinr_pair({1.0, 1.0, 1.0, 1.0, 0.0}, DecodingOrder::User2First), DomainError);
}

TEST_CASE("Rayleigh density and distribution") {
  const FadingSpec f{1.0, 4.0};
  CHECK(nakagami_pdf(2.0, f) == doctest::Approx(std::exp(-0.5) / 4.0).epsilon(1e-14));
  CHECK(nakagami_cdf(2.0, f) == doctest::Approx(1.0 - std::exp(-0.5)).epsilon(1e-14));
  CHECK(nakagami_pdf(-1.0, f) == 0.0);
}

TEST_CASE("Nakagami m = 2 density") {
  const FadingSpec f{2.0, 10.0};
  // (m/g)^m x^(m-1) e^(-m x / g) / Gamma(m)
  const double x = 3.0;
  CHECK(nakagami_pdf(x, f) == doctest::Approx(0.04 * x * std::exp(-0.2 * x)).epsilon(1e-14));
}

TEST_CASE("density normalizes and has the requested mean") {
  for (double m : {0.5, 0.75, 1.0, 2.0, 5.0, 8.0}) {
    const FadingSpec f{m, 7.0};
    CAPTURE(m);
    CHECK(fading_expectation([](double) { return 1.0; }, f, {}) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fading_expectation([](double g) { return g; }, f, {}) == doctest::Approx(7.0).epsilon(1e-8));
  }
}

TEST_CASE("point-mass channels") {
  const FadingSpec f = FadingSpec::point_mass(5.0);
  CHECK(f.is_point_mass());
  CHECK(fading_expectation([](double g) { return g * g; }, f, {}) == 25.0);
  const auto s = sample_snr(f, 1, 4);
  for (double v : s) CHECK(v == 5.0);
  CHECK_THROWS_AS(nakagami_pdf(1.0, f), DomainError);
}

TEST_CASE("sampling is deterministic and matches the mean") {
  const FadingSpec f{2.0, 3.0};
  const auto a = sample_snr(f, 99, 200000);
  const auto b = sample_snr(f, 99, 200000);
  CHECK(a == b);
  const double mean = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(a.size());
  // standard error 3 / sqrt(2 * 2e5) ~ 0.0047
  CHECK(std::abs(mean - 3.0) < 0.03);
  CHECK(sample_snr(f, 100, 10) != sample_snr(f, 99, 10));
}

TEST_CASE("fading spec validation") {
  CHECK_THROWS_AS(FadingSpec({0.3, 1.0}).validate(), DomainError);
  CHECK_THROWS_AS(FadingSpec({1.0, 0.0}).validate(), DomainError);
  CHECK_THROWS_AS(sample_snr({1.0, 1.0}, 1, 0), DomainError);
}
