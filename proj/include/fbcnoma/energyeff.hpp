#pragma once

// epsilon-effective energy efficiency with a CSI-free (constant) power
// allocation: EC(nu_bar) / (eta nu_bar P + P_c).

#include <cstdint>
#include <string>
#include <vector>

#include "fbcnoma/channel.hpp"
#include "fbcnoma/effcap.hpp"
#include "fbcnoma/fbc.hpp"

namespace fbcnoma {

struct PowerModel {
  /// Amplifier inefficiency factor.
  double eta = 1.4;
  /// Circuit power, watts.
  double circuit_power = 10.0;
  /// Cap on the average transmit power nu_bar * P, watts.
  double mean_power_cap = 1000.0;

  void validate() const;
};

enum class EeMethod { Direct, GoldenSection, FixedPoint, GridScan };
const char* to_string(EeMethod m);

struct EeResult {
  /// Bits per joule per channel use (EC over total power).
  double value = 0.0;
  double argmax_nu = 0.0;
  EeMethod method = EeMethod::Direct;
  double ec = 0.0;
  /// The optimum sits on the mean_power_cap boundary.
  bool at_cap = false;
  int iterations = 0;
};

/// eta * nu_bar * base_power + circuit_power.
double total_power(double nu_bar, double base_power, const PowerModel& pm);

/// Upper end of the feasible nu_bar range, mean_power_cap / base_power.
double nu_cap(double base_power, const PowerModel& pm);

/// EE at a given nu_bar. Throws CapViolation above the cap. The fading SNR
/// is the SNR at transmit power base_power; nu_bar scales it.
EeResult ee_value(double nu_bar, const QosSpec& q, const FadingSpec& fading,
                  const PowerModel& pm, double base_power,
                  const QuadratureSpec& quad = {});

/// Golden-section search over log(nu_bar) in (0, cap].
EeResult maximize_ee_golden(const QosSpec& q, const FadingSpec& fading,
                            const PowerModel& pm, double base_power,
                            const QuadratureSpec& quad = {});

/// Solves nu = EC / EC' - P_c / (eta P) for nu, with EC' by central
/// differences (step 1e-5 nu). The iteration uses a secant update kept
/// inside a sign bracket of nu - T(nu); stops when successive iterates
/// differ by less than 1e-8 relative.
EeResult maximize_ee_fixed_point(const QosSpec& q, const FadingSpec& fading,
                                 const PowerModel& pm, double base_power,
                                 const QuadratureSpec& quad = {},
                                 int max_iterations = 200);

/// Geometric grid of `points` values over [cap * 1e-6, cap].
std::vector<double> ee_grid(double base_power, const PowerModel& pm,
                            int points = 1000);

/// Best point of ee_grid.
EeResult maximize_ee_grid(const QosSpec& q, const FadingSpec& fading,
                          const PowerModel& pm, double base_power,
                          int points = 1000, const QuadratureSpec& quad = {});

/// G(nu) = EC'(nu) (eta nu P + P_c) - eta P EC(nu); zero at the optimum.
double ee_stationarity(double nu_bar, const QosSpec& q, const FadingSpec& fading,
                       const PowerModel& pm, double base_power,
                       const QuadratureSpec& quad = {});

/// Number of sign changes of successive differences of `values`.
int sign_changes_of_differences(const std::vector<double>& values);

struct EcMonotonicityReport {
  int points = 0;
  std::vector<std::string> violations;
  /// Largest relative gap between the analytic point-mass derivative of EC
  /// in nu_bar and its central difference.
  double max_derivative_rel_error = 0.0;
};

/// Random checks that EC increases in the rate and in nu_bar.
EcMonotonicityReport theorem4_checks(int points, std::uint64_t seed,
                               const QuadratureSpec& quad = {});

/// d EC / d nu_bar for a non-fading channel at SNR g (closed form).
double ec_derivative_point_mass(const QosSpec& q, double snr, double nu_bar);

}  // namespace fbcnoma
