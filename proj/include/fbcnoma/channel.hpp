#pragma once

// Nakagami-m block fading and the two-user uplink SINR model with
// successive interference cancellation at the base station.

#include <cstdint>
#include <utility>
#include <vector>

#include "fbcnoma/numerics.hpp"

namespace fbcnoma {

struct FadingSpec {
  /// Nakagami shape. +infinity denotes a non-fading (point mass) channel.
  double m = 1.0;
  /// Mean SNR, linear.
  double mean_snr = 1.0;

  static FadingSpec point_mass(double snr);
  bool is_point_mass() const;
  void validate() const;
};

struct SicScenario {
  double p1 = 1.0;
  double p2 = 1.0;
  double g1 = 1.0;
  double g2 = 1.0;
  double noise = 1.0;

  void validate() const;
};

enum class DecodingOrder { User1First, User2First };

/// How the user decoded second is treated when user 2 is decoded first.
/// PostSic removes the interference entirely; AsPrinted keeps the
/// self-interference term p1 g1 in the denominator.
enum class SecondUserSinr { PostSic, AsPrinted };

struct SinrPair {
  double user1 = 0.0;
  double user2 = 0.0;
};

SinrPair sinr_pair(const SicScenario& s, DecodingOrder order,
                   SecondUserSinr mode = SecondUserSinr::PostSic);

/// Density of the instantaneous SNR, a Gamma(m, mean_snr / m) law.
double nakagami_pdf(double gamma, const FadingSpec& spec);
double nakagami_cdf(double gamma, const FadingSpec& spec);

/// Deterministic given the seed (mt19937_64).
std::vector<double> sample_snr(const FadingSpec& spec, std::uint64_t seed,
                               std::size_t count);

/// E[f(gamma)] under the fading law. Point-mass channels return f(mean_snr).
/// The truncation point is widened for m < 1, whose tail is heavier.
double fading_expectation(const ScalarFn& f, const FadingSpec& spec,
                          const QuadratureSpec& quad,
                          std::span<const double> breakpoints = {});

}  // namespace fbcnoma
