#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fbcnoma {

struct SuiteOutcome {
  std::string name;
  bool passed = false;
  double seconds = 0.0;
  std::vector<std::string> failures;
};

/// Runs the property suites of every module, printing one line per suite.
std::vector<SuiteOutcome> run_selftest(std::ostream& out);

}  // namespace fbcnoma
