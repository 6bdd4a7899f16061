#include "fbcnoma/energyeff.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "fbcnoma/errors.hpp"

namespace fbcnoma {

namespace {

constexpr double kLn2 = std::numbers::ln2;

double ec_at(double nu_bar, const QosSpec& q, const FadingSpec& fading,
             const QuadratureSpec& quad) {
  return effective_capacity_constant(q, fading, nu_bar, quad).value;
}

double ec_slope(double nu_bar, const QosSpec& q, const FadingSpec& fading,
                const QuadratureSpec& quad) {
  const double h = 1e-5 * nu_bar;
  return (ec_at(nu_bar + h, q, fading, quad) - ec_at(nu_bar - h, q, fading, quad)) /
         (2.0 * h);
}

void check_inputs(const QosSpec& q, const PowerModel& pm, double base_power) {
  q.validate();
  pm.validate();
  if (!(base_power > 0.0)) throw DomainError("energy efficiency: base_power must be positive");
}

}  // namespace

void PowerModel::validate() const {
  if (!(eta > 0.0)) throw DomainError("PowerModel: eta must be positive");
  if (!(circuit_power >= 0.0)) throw DomainError("PowerModel: circuit_power must be >= 0");
  if (!(mean_power_cap > 0.0)) throw DomainError("PowerModel: mean_power_cap must be positive");
}

const char* to_string(EeMethod m) {
  switch (m) {
    case EeMethod::Direct: return "Direct";
    case EeMethod::GoldenSection: return "GoldenSection";
    case EeMethod::FixedPoint: return "FixedPoint";
    case EeMethod::GridScan: return "GridScan";
  }
  return "?";
}

double total_power(double nu_bar, double base_power, const PowerModel& pm) {
  if (!(nu_bar >= 0.0)) throw DomainError("total_power: nu_bar must be >= 0");
  return pm.eta * nu_bar * base_power + pm.circuit_power;
}

double nu_cap(double base_power, const PowerModel& pm) {
  return pm.mean_power_cap / base_power;
}

EeResult ee_value(double nu_bar, const QosSpec& q, const FadingSpec& fading,
                  const PowerModel& pm, double base_power,
                  const QuadratureSpec& quad) {
  check_inputs(q, pm, base_power);
  if (!(nu_bar > 0.0)) throw DomainError("ee_value: nu_bar must be positive");
  if (nu_bar * base_power > pm.mean_power_cap * (1.0 + 1e-12)) {
    throw CapViolation("ee_value: average transmit power " +
                       std::to_string(nu_bar * base_power) +
                       " W exceeds the cap of " +
                       std::to_string(pm.mean_power_cap) + " W");
  }
  EeResult r;
  r.argmax_nu = nu_bar;
  r.ec = ec_at(nu_bar, q, fading, quad);
  r.value = r.ec / total_power(nu_bar, base_power, pm);
  r.method = EeMethod::Direct;
  return r;
}

EeResult maximize_ee_golden(const QosSpec& q, const FadingSpec& fading,
                            const PowerModel& pm, double base_power,
                            const QuadratureSpec& quad) {
  check_inputs(q, pm, base_power);
  const double cap = nu_cap(base_power, pm);
  int evals = 0;
  const auto f = [&](double u) {
    ++evals;
    const double nu = std::min(std::exp(u), cap);
    return ec_at(nu, q, fading, quad) / total_power(nu, base_power, pm);
  };
  const Extremum best =
      golden_section_max(f, std::log(cap * 1e-8), std::log(cap), 1e-10);
  EeResult r = ee_value(std::min(std::exp(best.argmax), cap), q, fading, pm,
                        base_power, quad);
  r.method = EeMethod::GoldenSection;
  r.iterations = evals;
  r.at_cap = r.argmax_nu >= cap * (1.0 - 1e-8);
  return r;
}

double ee_stationarity(double nu_bar, const QosSpec& q, const FadingSpec& fading,
                       const PowerModel& pm, double base_power,
                       const QuadratureSpec& quad) {
  const double slope = ec_slope(nu_bar, q, fading, quad);
  return slope * total_power(nu_bar, base_power, pm) -
         pm.eta * base_power * ec_at(nu_bar, q, fading, quad);
}

EeResult maximize_ee_fixed_point(const QosSpec& q, const FadingSpec& fading,
                                 const PowerModel& pm, double base_power,
                                 const QuadratureSpec& quad,
                                 int max_iterations) {
  check_inputs(q, pm, base_power);
  const double cap = nu_cap(base_power, pm);
  const double offset = pm.circuit_power / (pm.eta * base_power);
  // g(nu) = nu - T(nu), T(nu) = EC / EC' - offset. g > 0 below the optimum.
  const auto g = [&](double nu) {
    return nu - (ec_at(nu, q, fading, quad) / ec_slope(nu, q, fading, quad) - offset);
  };

  std::vector<double> trace;
  const auto fail = [&](const std::string& why) {
    std::ostringstream os;
    os << "maximize_ee_fixed_point: " << why << "; iterates:";
    for (double v : trace) os << ' ' << v;
    throw ConvergenceError(os.str());
  };

  double x = std::min(1.0, 0.5 * cap);
  double gx = g(x);
  trace.push_back(x);
  double lo, hi, glo, ghi;
  if (gx > 0.0) {
    lo = x;
    glo = gx;
    hi = x;
    ghi = gx;
    while (ghi > 0.0) {
      if (hi >= cap) {
        EeResult r = ee_value(cap, q, fading, pm, base_power, quad);
        r.method = EeMethod::FixedPoint;
        r.at_cap = true;
        r.iterations = static_cast<int>(trace.size());
        return r;
      }
      lo = hi;
      glo = ghi;
      hi = std::min(2.0 * hi, cap);
      ghi = g(hi);
      trace.push_back(hi);
      if (static_cast<int>(trace.size()) > max_iterations) fail("no upper bracket");
    }
  } else {
    hi = x;
    ghi = gx;
    lo = x;
    glo = gx;
    while (glo <= 0.0) {
      hi = lo;
      ghi = glo;
      lo *= 0.5;
      glo = g(lo);
      trace.push_back(lo);
      if (static_cast<int>(trace.size()) > max_iterations) fail("no lower bracket");
    }
  }

  // Illinois false position on g inside [lo, hi].
  double prev = hi;
  int side = 0;
  for (int it = 0; it < max_iterations; ++it) {
    const double x_new = (lo * ghi - hi * glo) / (ghi - glo);
    trace.push_back(x_new);
    if (std::abs(x_new - prev) < 1e-8 * x_new || hi - lo < 1e-12 * hi) {
      EeResult r = ee_value(x_new, q, fading, pm, base_power, quad);
      r.method = EeMethod::FixedPoint;
      r.iterations = static_cast<int>(trace.size());
      return r;
    }
    prev = x_new;
    const double gn = g(x_new);
    if (gn > 0.0) {
      lo = x_new;
      glo = gn;
      if (side == -1) ghi *= 0.5;
      side = -1;
    } else {
      hi = x_new;
      ghi = gn;
      if (side == 1) glo *= 0.5;
      side = 1;
    }
  }
  fail("iteration limit reached");
  return {};
}

std::vector<double> ee_grid(double base_power, const PowerModel& pm, int points) {
  if (points < 2) throw DomainError("ee_grid: need at least two points");
  const double cap = nu_cap(base_power, pm);
  const double lo = std::log(cap * 1e-6);
  const double hi = std::log(cap);
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) {
    grid[i] = i + 1 == points ? cap : std::exp(lo + (hi - lo) * i / (points - 1));
  }
  return grid;
}

EeResult maximize_ee_grid(const QosSpec& q, const FadingSpec& fading,
                          const PowerModel& pm, double base_power, int points,
                          const QuadratureSpec& quad) {
  EeResult best;
  best.value = -1.0;
  for (double nu : ee_grid(base_power, pm, points)) {
    const EeResult r = ee_value(nu, q, fading, pm, base_power, quad);
    if (r.value > best.value) best = r;
  }
  best.method = EeMethod::GridScan;
  best.iterations = points;
  best.at_cap = best.argmax_nu >= nu_cap(base_power, pm);
  return best;
}

int sign_changes_of_differences(const std::vector<double>& values) {
  int changes = 0;
  int last = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double d = values[i] - values[i - 1];
    const int s = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

double ec_derivative_point_mass(const QosSpec& q, double snr, double nu_bar) {
  const double x = nu_bar * snr;
  const double r = achievable_rate(x, q);
  if (r <= 0.0) return 0.0;
  const double qinv = q.epsilon == 0.0 ? 0.0 : inv_q(q.epsilon);
  const double b = std::sqrt(x * (x + 2.0));
  const double dr = 1.0 / ((1.0 + x) * kLn2) -
                    qinv / (std::sqrt(q.blocklength) * kLn2) /
                        ((1.0 + x) * (1.0 + x) * b);
  const double e = std::exp(-q.theta * r);
  const double inner = q.epsilon + (1.0 - q.epsilon) * e;
  return (1.0 - q.epsilon) * e * dr * snr / inner;
}

EcMonotonicityReport theorem4_checks(int points, std::uint64_t seed,
                               const QuadratureSpec& quad) {
  EcMonotonicityReport rep;
  rep.points = points;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto log_uniform = [&](double a, double b) {
    return std::exp(std::log(a) + (std::log(b) - std::log(a)) * unit(rng));
  };
  for (int i = 0; i < points; ++i) {
    QosSpec q;
    q.theta = log_uniform(1e-6, 1.0);
    // The last point of every hundred probes the epsilon -> 0.5 boundary.
    q.epsilon = i % 100 == 99 ? 0.4999 : log_uniform(1e-6, 0.49);
    q.blocklength = std::floor(100.0 + 1900.0 * unit(rng));
    const double gbar = log_uniform(1.0, 1000.0);
    const double nu = log_uniform(0.1, 10.0);
    std::ostringstream where;
    where << "theta=" << q.theta << " eps=" << q.epsilon
          << " n=" << q.blocklength << " mean_snr=" << gbar << " nu=" << nu;

    // (a) EC of a single state increases with the rate.
    const auto ec_of_rate = [&](double r) {
      return -std::log(q.epsilon + (1.0 - q.epsilon) * std::exp(-q.theta * r)) /
             q.theta;
    };
    const double r0 = std::max(achievable_rate(nu * gbar, q), 0.0) + 0.1;
    if (!(ec_of_rate(r0 * 1.001) > ec_of_rate(r0))) {
      rep.violations.push_back("EC not increasing in the rate at " + where.str());
    }

    // (b) EC over Rayleigh fading increases with nu_bar.
    const FadingSpec fading{1.0, gbar};
    const double e1 = effective_capacity_constant(q, fading, nu, quad).value;
    const double e2 = effective_capacity_constant(q, fading, nu * 1.01, quad).value;
    const double e3 = effective_capacity_constant(q, fading, nu * 2.0, quad).value;
    if (!(e2 > e1) || !(e3 > e2)) {
      rep.violations.push_back("EC not increasing in nu_bar at " + where.str());
    }

    // (c) analytic derivative at a non-fading channel vs central difference.
    if (achievable_rate(nu * gbar, q) > 0.0) {
      const FadingSpec pm = FadingSpec::point_mass(gbar);
      const double h = 1e-5 * nu;
      const double fd =
          (effective_capacity_constant(q, pm, nu + h, quad).value -
           effective_capacity_constant(q, pm, nu - h, quad).value) /
          (2.0 * h);
      const double an = ec_derivative_point_mass(q, gbar, nu);
      if (!(an > 0.0)) {
        rep.violations.push_back("analytic derivative not positive at " + where.str());
      }
      // Skip points where the change over the step drowns in rounding.
      const double base = effective_capacity_constant(q, pm, nu, quad).value;
      if (an * h > 1e-9 * base) {
        rep.max_derivative_rel_error =
            std::max(rep.max_derivative_rel_error, std::abs(fd - an) / an);
      }
    }
  }
  return rep;
}

}  // namespace fbcnoma
