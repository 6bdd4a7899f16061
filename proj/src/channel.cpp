#include "fbcnoma/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "fbcnoma/errors.hpp"

namespace fbcnoma {

FadingSpec FadingSpec::point_mass(double snr) {
  return FadingSpec{std::numeric_limits<double>::infinity(), snr};
}

bool FadingSpec::is_point_mass() const { return std::isinf(m); }

void FadingSpec::validate() const {
  if (!(m >= 0.5)) {
    throw DomainError("FadingSpec: Nakagami m must be at least 0.5, got " +
                      std::to_string(m));
  }
  if (!(mean_snr > 0.0) || !std::isfinite(mean_snr)) {
    throw DomainError("FadingSpec: mean_snr must be positive and finite");
  }
}

void SicScenario::validate() const {
  if (!(p1 > 0.0 && p2 > 0.0 && g1 > 0.0 && g2 > 0.0 && noise > 0.0)) {
    throw DomainError("SicScenario: powers, gains and noise must be positive");
  }
}

SinrPair sinr_pair(const SicScenario& s, DecodingOrder order,
                   SecondUserSinr mode) {
  s.validate();
  const double r1 = s.p1 * s.g1;
  const double r2 = s.p2 * s.g2;
  if (order == DecodingOrder::User1First) {
    return {r1 / (r2 + s.noise), r2 / s.noise};
  }
  const double user1 =
      mode == SecondUserSinr::PostSic ? r1 / s.noise : r1 / (r1 + s.noise);
  return {user1, r2 / (r1 + s.noise)};
}

double nakagami_pdf(double gamma, const FadingSpec& spec) {
  spec.validate();
  if (spec.is_point_mass()) {
    throw DomainError("nakagami_pdf: a point-mass channel has no density");
  }
  if (gamma < 0.0) return 0.0;
  const double m = spec.m;
  const double rate = m / spec.mean_snr;
  if (gamma == 0.0) {
    if (m == 1.0) return rate;
    return m < 1.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return std::exp((m - 1.0) * std::log(gamma) - std::lgamma(m) +
                  m * std::log(rate) - rate * gamma);
}

double nakagami_cdf(double gamma, const FadingSpec& spec) {
  spec.validate();
  if (spec.is_point_mass()) return gamma >= spec.mean_snr ? 1.0 : 0.0;
  if (gamma <= 0.0) return 0.0;
  return regularized_lower_gamma(spec.m, spec.m * gamma / spec.mean_snr);
}

std::vector<double> sample_snr(const FadingSpec& spec, std::uint64_t seed,
                               std::size_t count) {
  spec.validate();
  if (count == 0) throw DomainError("sample_snr: count must be at least 1");
  std::vector<double> out(count, spec.mean_snr);
  if (spec.is_point_mass()) return out;
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> dist(spec.m, spec.mean_snr / spec.m);
  for (auto& v : out) v = dist(rng);
  return out;
}

double fading_expectation(const ScalarFn& f, const FadingSpec& spec,
                          const QuadratureSpec& quad,
                          std::span<const double> breakpoints) {
  spec.validate();
  if (spec.is_point_mass()) return f(spec.mean_snr);
  const double m = spec.m;
  const double rate = m / spec.mean_snr;
  const double log_norm = m * std::log(rate) - std::lgamma(m);
  const auto pdf = [=](double g) {
    if (g <= 0.0) return nakagami_pdf(g, spec);
    return std::exp(log_norm + (m - 1.0) * std::log(g) - rate * g);
  };
  const double scale = spec.mean_snr / std::min(m, 1.0);
  return expect_over_pdf(f, pdf, scale, quad, breakpoints);
}

}  // namespace fbcnoma
