#pragma once

// Block-level queue driven by constant arrivals and finite-blocklength
// service, used to check the exponential tail implied by the QoS exponent.

#include <cstdint>
#include <vector>

#include "fbcnoma/channel.hpp"
#include "fbcnoma/fbc.hpp"
#include "fbcnoma/numerics.hpp"

namespace fbcnoma {

struct QueueSimConfig {
  /// Bits arriving per block.
  double arrival_rate = 0.0;
  std::int64_t blocks = 10'000'000;
  std::uint64_t seed = 1;
  /// Queue-length thresholds in bits, strictly ascending.
  std::vector<double> thresholds;
  std::int64_t warmup_blocks = 1000;
  /// Thresholds with fewer exceedances are left out of the fit.
  std::int64_t min_exceedances = 50;
  /// Batches used for the slope standard error.
  int batches = 10;

  void validate() const;
};

struct ThresholdProbability {
  double threshold = 0.0;
  double probability = 0.0;
  std::int64_t exceedances = 0;
};

struct TailEstimate {
  /// Fitted decay rate of Pr{Q > x} in x (per bit).
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<ThresholdProbability> per_threshold_probs;
  double fit_r2 = 0.0;
  /// Standard error from batch means; 0 when fewer than two batches fit.
  double slope_stderr = 0.0;
  bool slope_defined = false;
  int thresholds_used = 0;
  double mean_service = 0.0;
  double max_queue = 0.0;
};

/// Lindley recursion Q <- max(0, Q + a - S) with S = n R(nu(g) g)+ on
/// success and 0 on a decoding failure (probability epsilon).
/// Throws InstabilityError when the empirical mean service does not exceed
/// the arrivals, InsufficientEventsError when fewer than two thresholds have
/// enough exceedances. Zero arrivals give an undefined slope, not an error.
TailEstimate simulate_queue(const QosSpec& q, const FadingSpec& fading,
                            const ScalarFn& policy, const QueueSimConfig& cfg);

/// n * EC under the DefOne normalization: the largest constant arrival in
/// bits per block whose backlog tail decays at rate theta.
double queue_arrival_for_theta(const QosSpec& q, const FadingSpec& fading,
                               double nu_bar, const QuadratureSpec& quad = {});

/// `count` evenly spaced thresholds on (0, span_in_decays / theta].
std::vector<double> default_thresholds(double theta, int count = 30,
                                       double span_in_decays = 15.0);

struct TailSweepRow {
  double theta = 0.0;
  double arrival_rate = 0.0;
  TailEstimate estimate;
  double relative_error = 0.0;
};

/// For every theta: arrivals at queue_arrival_for_theta, default
/// thresholds, constant allocation nu_bar. `cfg` supplies blocks, seed,
/// warmup and fit settings.
std::vector<TailSweepRow> tail_slope_sweep(const std::vector<double>& thetas,
                                           const QosSpec& base,
                                           const FadingSpec& fading,
                                           double nu_bar,
                                           const QueueSimConfig& cfg,
                                           const QuadratureSpec& quad = {});

}  // namespace fbcnoma
