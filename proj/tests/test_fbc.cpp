#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "fbcnoma/errors.hpp"
#include "fbcnoma/fbc.hpp"
#include "fbcnoma/numerics.hpp"

using namespace fbcnoma;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// F(n, nu) in long double, written out independently of the library.
long double f_ld(long double n, long double nu, long double g, long double q) {
  const long double x = nu * g;
  const long double v = 1.0L - 1.0L / ((1.0L + x) * (1.0L + x));
  return n * std::log2(1.0L + x) - std::sqrt(n * v) * q / std::numbers::ln2_v<long double>;
}

}  // namespace

TEST_CASE("rate at unit SNR, n = 100, eps = 1e-3") {
  // mpmath: 0.613903113827172131383072429782
  CHECK(rel(achievable_rate(1.0, 100.0, 1e-3), 0.613903113827172131383) < 1e-13);
  CHECK(achievable_rate(1.0, 100.0, 1e-3) == doctest::Approx(0.6139).epsilon(1e-4));
}

TEST_CASE("rate at 20 dB, n = 1000, eps = 1e-3") {
  CHECK(rel(achievable_rate(100.0, 1000.0, 1e-3), 6.51723574386495362500646388633) < 1e-13);
}

TEST_CASE("capacity and dispersion") {
  const auto cd = capacity_dispersion(3.0);
  CHECK(cd.capacity == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(cd.dispersion == doctest::Approx(1.0 - 1.0 / 16.0).epsilon(1e-15));
  CHECK(capacity_dispersion(0.0).dispersion == 0.0);
  // small-gamma behaviour: V ~ 2 gamma
  CHECK(rel(capacity_dispersion(1e-12).dispersion, 2e-12) < 1e-9);
}

TEST_CASE("epsilon = 0 is the infinite-blocklength reference") {
  CHECK(achievable_rate(10.0, 50.0, 0.0) == capacity_dispersion(10.0).capacity);
  CHECK_THROWS_AS(achievable_rate(10.0, 50.0, 1.0), DomainError);
  CHECK_THROWS_AS(achievable_rate(10.0, 0.0, 0.1), DomainError);
}

TEST_CASE("rate penalty scales as 1/sqrt(n)") {
  const double c = capacity_dispersion(100.0).capacity;
  const double k = (c - achievable_rate(100.0, 1e3, 1e-3)) * std::sqrt(1e3);
  for (double n = 1e4; n <= 1e9; n *= 10.0) {
    CHECK(rel((c - achievable_rate(100.0, n, 1e-3)) * std::sqrt(n), k) < 1e-9);
  }
}

TEST_CASE("rate increases with n and with gamma") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lg(-2.0, 3.0), le(-6.0, std::log10(0.49));
  for (int i = 0; i < 200; ++i) {
    const double g = std::pow(10.0, lg(rng));
    const double e = std::pow(10.0, le(rng));
    CHECK(achievable_rate(g, 1200.0, e) > achievable_rate(g, 1000.0, e));
    CHECK(achievable_rate(g * 1.01, 1000.0, e) > achievable_rate(g, 1000.0, e));
  }
}

TEST_CASE("zero-rate SNR") {
  const double g0 = rate_zero_snr(1000.0, 1e-3);
  CHECK(std::abs(achievable_rate(g0, 1000.0, 1e-3)) < 1e-12);
  CHECK(achievable_rate(0.9 * g0, 1000.0, 1e-3) < 0.0);
  CHECK(rate_zero_snr(1000.0, 0.0) == 0.0);
  CHECK(rate_zero_snr(1000.0, 0.6) == 0.0);
}

TEST_CASE("analytic Hessian against a long-double finite difference") {
  for (double eps : {1e-6, 1e-3, 0.2}) {
    const long double q = inv_q(eps);
    for (double n : {120.0, 1000.0, 5000.0}) {
      for (double nu : {0.1, 1.0, 8.0}) {
        const double g = 2.0;
        const long double hn = 1e-3L * n, hv = 1e-3L * nu;
        const auto f = [&](long double a, long double b) { return f_ld(a, b, g, q); };
        const long double nn = (f(n + hn, nu) - 2 * f(n, nu) + f(n - hn, nu)) / (hn * hn);
        const long double vv = (f(n, nu + hv) - 2 * f(n, nu) + f(n, nu - hv)) / (hv * hv);
        const long double nv =
            (f(n + hn, nu + hv) - f(n + hn, nu - hv) - f(n - hn, nu + hv) + f(n - hn, nu - hv)) /
            (4 * hn * hv);
        const Hessian2 h = hessian_F(n, nu, g, eps);
        CAPTURE(eps);
        CAPTURE(n);
        CAPTURE(nu);
        CHECK(rel(h.nn, static_cast<double>(nn)) < 1e-4);
        CHECK(rel(h.vv, static_cast<double>(vv)) < 1e-4);
        CHECK(rel(h.nv, static_cast<double>(nv)) < 1e-4);
        CHECK(h.nv == h.vn);
      }
    }
  }
}

TEST_CASE("library finite-difference Hessian agrees with the analytic one") {
  const Hessian2 a = hessian_F(800.0, 1.3, 1.0, 1e-3);
  const Hessian2 d = hessian_F_numeric(800.0, 1.3, 1.0, 1e-3);
  CHECK(rel(d.nn, a.nn) < 1e-6);
  CHECK(rel(d.nv, a.nv) < 1e-6);
  CHECK(rel(d.vv, a.vv) < 1e-6);
}

TEST_CASE("Hessian is indefinite at large n") {
  // d2F/dnu2 ~ -n g^2 / (a^2 ln 2) dominates once n is large.
  const Hessian2 h = hessian_F(1000.0, 1.0, 1.0, 1e-3);
  CHECK(h.nn > 0.0);
  CHECK(h.vv < 0.0);
  CHECK(h.determinant() == doctest::Approx(-0.5157).epsilon(1e-3));
  CHECK_FALSE(h.positive_definite());
}

TEST_CASE("n_rt solves its quadratic") {
  for (double eps : {1e-6, 1e-3, 0.3}) {
    for (double gdb = 0.0; gdb <= 20.0; gdb += 2.5) {
      const double g = std::pow(10.0, gdb / 10.0);
      const double t = n_rt(1.0, g, eps);
      CHECK(t > 0.0);
      CHECK(std::abs(n_rt_relative_residual(t, 1.0, g, eps)) <= 1e-12);
    }
  }
}

TEST_CASE("n_rt closed-form values at eps = 1e-6") {
  // independent: the quadratic -4 t^2 + t Q D + 3 Q^2 / a^2 = 0, positive root
  const double q = 4.75342430882289895733886399995;
  for (double g : {1.0, 10.0, 100.0}) {
    const double a = 1.0 + g, b = std::sqrt(g * (g + 2.0));
    const double d = 4.0 / (a * b) - b / a;
    const double qa = -4.0, qb = q * d, qc = 3.0 * q * q / (a * a);
    const double t = (-qb - std::sqrt(qb * qb - 4.0 * qa * qc)) / (2.0 * qa);
    CHECK(rel(n_rt(1.0, g, 1e-6), t) < 1e-12);
  }
  CHECK(n_rt(1.0, 1.0, 1e-6) * n_rt(1.0, 1.0, 1e-6) == doctest::Approx(5.004).epsilon(1e-3));
}

TEST_CASE("as-printed n_rt differs and both decrease with SNR") {
  double prev = 1e300, prev_p = 1e300;
  for (double gdb = 0.0; gdb <= 20.0; gdb += 1.0) {
    const double g = std::pow(10.0, gdb / 10.0);
    const double t = n_rt(1.0, g, 1e-6), p = n_rt_as_printed(1.0, g, 1e-6);
    CHECK(t * t < prev);
    CHECK(p * p < prev_p);
    prev = t * t;
    prev_p = p * p;
  }
  CHECK(n_rt_as_printed(1.0, 1.0, 1e-6) * n_rt_as_printed(1.0, 1.0, 1e-6) ==
        doctest::Approx(389.67).epsilon(1e-4));
}

TEST_CASE("regime validation") {
  QosSpec q{1e-3, 0.6, 1000.0, 100.0};
  CHECK_THROWS_AS(q.validate_regime(), DomainError);
  q.epsilon = 1e-3;
  q.blocklength = 50.0;
  CHECK_THROWS_AS(q.validate_regime(), DomainError);
  q.blocklength = 100.0;
  CHECK_NOTHROW(q.validate_regime());
  CHECK_THROWS_AS(n_rt(1.0, 1.0, 0.5), DomainError);
  CHECK_THROWS_AS(QosSpec({0.0, 1e-3, 1000.0, 100.0}).validate(), DomainError);
}
