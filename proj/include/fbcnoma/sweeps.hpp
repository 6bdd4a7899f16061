#pragma once

// Figure-reproduction sweeps and their CSV form.

#include <string>
#include <vector>

#include "fbcnoma/scenario.hpp"

namespace fbcnoma {

inline constexpr const char* kToolVersion = "0.1.0";

struct SweepTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  /// Free-text remarks written as comment lines after the data.
  std::vector<std::string> notes;
};

const std::vector<std::string>& sweep_names();

/// Throws ValidationError for an unknown name.
SweepTable run_sweep(const std::string& name, const Scenario& scenario);

/// Header, rows (%.12g) and a provenance footer of '#' lines.
std::string to_csv(const SweepTable& table, const std::string& name,
                   const Scenario& scenario);

}  // namespace fbcnoma
