#include "fbcnoma/queuesim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "fbcnoma/effcap.hpp"
#include "fbcnoma/errors.hpp"

namespace fbcnoma {

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

}  // namespace

void QueueSimConfig::validate() const {
  if (!(arrival_rate >= 0.0) || !std::isfinite(arrival_rate)) {
    throw DomainError("QueueSimConfig: arrival_rate must be finite and >= 0");
  }
  if (blocks < 100000) {
    throw DomainError("QueueSimConfig: at least 1e5 blocks are needed for tail estimation");
  }
  if (warmup_blocks < 0 || warmup_blocks >= blocks) {
    throw DomainError("QueueSimConfig: warmup_blocks must lie in [0, blocks)");
  }
  if (thresholds.empty()) throw DomainError("QueueSimConfig: no thresholds given");
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > 0.0) || (i > 0 && !(thresholds[i] > thresholds[i - 1]))) {
      throw DomainError("QueueSimConfig: thresholds must be positive and strictly ascending");
    }
  }
  if (min_exceedances < 1) throw DomainError("QueueSimConfig: min_exceedances must be >= 1");
  if (batches < 1) throw DomainError("QueueSimConfig: batches must be >= 1");
}

TailEstimate simulate_queue(const QosSpec& q, const FadingSpec& fading,
                            const ScalarFn& policy, const QueueSimConfig& cfg) {
  q.validate();
  fading.validate();
  cfg.validate();

  const double qinv = q.epsilon == 0.0 || q.epsilon >= 1.0 ? 0.0 : inv_q(q.epsilon);
  const double n = q.blocklength;
  const double scale = std::sqrt(1.0 / n) * qinv / std::numbers::ln2;
  const auto service = [&](double g) {
    const double x = policy(g) * g;
    if (!(x > 0.0)) return 0.0;
    const double inv = 1.0 / (1.0 + x);
    const double r = std::log2(1.0 + x) - std::sqrt(x * (x + 2.0)) * inv * scale;
    return r > 0.0 ? n * r : 0.0;
  };

  std::mt19937_64 rng(cfg.seed);
  const bool fades = !fading.is_point_mass();
  std::gamma_distribution<double> snr(fades ? fading.m : 1.0,
                                      fades ? fading.mean_snr / fading.m : 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double fixed_service = fades ? 0.0 : service(fading.mean_snr);

  const std::size_t k = cfg.thresholds.size();
  const std::int64_t measured = cfg.blocks - cfg.warmup_blocks;
  const int batches = static_cast<int>(std::min<std::int64_t>(cfg.batches, measured));
  // hist[b][j]: blocks of batch b whose backlog exceeds exactly j thresholds.
  std::vector<std::vector<std::int64_t>> hist(batches, std::vector<std::int64_t>(k + 1, 0));

  double backlog = 0.0;
  double served_total = 0.0;
  double max_queue = 0.0;
  for (std::int64_t t = 0; t < cfg.blocks; ++t) {
    double s = fades ? service(snr(rng)) : fixed_service;
    if (unit(rng) < q.epsilon) s = 0.0;
    served_total += s;
    backlog = std::max(0.0, backlog + cfg.arrival_rate - s);
    if (t < cfg.warmup_blocks) continue;
    max_queue = std::max(max_queue, backlog);
    const auto j = static_cast<std::size_t>(
        std::lower_bound(cfg.thresholds.begin(), cfg.thresholds.end(), backlog) -
        cfg.thresholds.begin());
    const std::int64_t b = (t - cfg.warmup_blocks) * batches / measured;
    ++hist[b][j];
  }

  TailEstimate est;
  est.mean_service = served_total / static_cast<double>(cfg.blocks);
  est.max_queue = max_queue;
  if (cfg.arrival_rate > 0.0 && !(est.mean_service > cfg.arrival_rate)) {
    throw InstabilityError("simulate_queue: arrivals of " +
                           std::to_string(cfg.arrival_rate) +
                           " bits per block exceed the mean service of " +
                           std::to_string(est.mean_service));
  }

  // Pr{Q > th_j} counts blocks that exceed more than j thresholds.
  const auto exceed_counts = [&](int first, int last) {
    std::vector<std::int64_t> c(k, 0);
    for (int b = first; b < last; ++b) {
      std::int64_t above = 0;
      for (std::size_t j = k + 1; j-- > 1;) {
        above += hist[b][j];
        c[j - 1] = above;
      }
    }
    return c;
  };
  const auto total = exceed_counts(0, batches);
  std::vector<double> xs, ys;
  for (std::size_t j = 0; j < k; ++j) {
    const double p = static_cast<double>(total[j]) / static_cast<double>(measured);
    est.per_threshold_probs.push_back({cfg.thresholds[j], p, total[j]});
    if (total[j] >= cfg.min_exceedances) {
      xs.push_back(cfg.thresholds[j]);
      ys.push_back(std::log(p));
    }
  }
  est.thresholds_used = static_cast<int>(xs.size());
  if (total[0] == 0) return est;  // nothing ever queued past the first threshold
  if (xs.size() < 2) {
    throw InsufficientEventsError(
        "simulate_queue: fewer than two thresholds have at least " +
        std::to_string(cfg.min_exceedances) + " exceedances");
  }
  const LineFit fit = least_squares(xs, ys);
  est.slope = -fit.slope;
  est.intercept = fit.intercept;
  est.fit_r2 = fit.r2;
  est.slope_defined = true;

  // Batch-means standard error of the slope over the same thresholds.
  std::vector<double> slopes;
  const std::int64_t per_batch = measured / batches;
  for (int b = 0; b < batches && batches >= 2; ++b) {
    const auto c = exceed_counts(b, b + 1);
    std::vector<double> bx, by;
    bool usable = true;
    for (std::size_t j = 0; j < k; ++j) {
      if (total[j] < cfg.min_exceedances) continue;
      if (c[j] == 0) {
        usable = false;
        break;
      }
      bx.push_back(cfg.thresholds[j]);
      by.push_back(std::log(static_cast<double>(c[j]) / static_cast<double>(per_batch)));
    }
    if (usable) slopes.push_back(-least_squares(bx, by).slope);
  }
  if (slopes.size() >= 2) {
    double mean = 0.0;
    for (double s : slopes) mean += s;
    mean /= static_cast<double>(slopes.size());
    double var = 0.0;
    for (double s : slopes) var += (s - mean) * (s - mean);
    var /= static_cast<double>(slopes.size() - 1);
    est.slope_stderr = std::sqrt(var / static_cast<double>(slopes.size()));
  }
  return est;
}

double queue_arrival_for_theta(const QosSpec& q, const FadingSpec& fading,
                               double nu_bar, const QuadratureSpec& quad) {
  return q.blocklength *
         effective_capacity_constant(q, fading, nu_bar, quad, EcNormalization::DefOne)
             .value;
}

std::vector<double> default_thresholds(double theta, int count,
                                       double span_in_decays) {
  if (!(theta > 0.0) || count < 1) throw DomainError("default_thresholds: bad arguments");
  std::vector<double> th(count);
  for (int i = 0; i < count; ++i) th[i] = span_in_decays / theta * (i + 1) / count;
  return th;
}

std::vector<TailSweepRow> tail_slope_sweep(const std::vector<double>& thetas,
                                           const QosSpec& base,
                                           const FadingSpec& fading,
                                           double nu_bar,
                                           const QueueSimConfig& cfg,
                                           const QuadratureSpec& quad) {
  std::vector<TailSweepRow> rows;
  for (double theta : thetas) {
    QosSpec q = base;
    q.theta = theta;
    QueueSimConfig c = cfg;
    c.arrival_rate = queue_arrival_for_theta(q, fading, nu_bar, quad);
    c.thresholds = default_thresholds(theta);
    TailSweepRow row;
    row.theta = theta;
    row.arrival_rate = c.arrival_rate;
    row.estimate = simulate_queue(q, fading, [nu_bar](double) { return nu_bar; }, c);
    row.relative_error = (row.estimate.slope - theta) / theta;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace fbcnoma
