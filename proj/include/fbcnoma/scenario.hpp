#pragma once

// INI-style scenario files and the dB / dBm boundary conversions.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "fbcnoma/channel.hpp"
#include "fbcnoma/energyeff.hpp"
#include "fbcnoma/fbc.hpp"
#include "fbcnoma/numerics.hpp"

namespace fbcnoma {

double db_to_linear(double db);
double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

struct Scenario {
  /// Raw "section.key" -> value text, after overrides.
  std::map<std::string, std::string> values;

  double get(const std::string& key) const;
  std::uint64_t seed() const;
  int grid_points() const;

  /// user is 1 or 2.
  QosSpec qos(int user) const;
  FadingSpec fading(int user) const;
  double mean_power_watts(int user) const;
  double noise_watts() const;
  PowerModel power_model() const;
  QuadratureSpec quadrature() const;

  /// FNV-1a over the canonical key=value listing, as 16 hex digits.
  std::string hash() const;
};

/// Parses and validates. Unknown sections or keys, duplicates, missing
/// required keys and malformed numbers raise ValidationError naming the key.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);

/// Applies "section.key=value" and re-validates.
void apply_override(Scenario& s, std::string_view assignment);

/// A scenario with the default parameter set, as file text.
std::string default_scenario_text();

}  // namespace fbcnoma
