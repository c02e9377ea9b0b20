#pragma once

#include <string>
#include <vector>

#include "sobdecomp/config.hpp"

namespace sobdecomp {

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double tol = 0.0;
  std::string note;
};

struct SuiteResult {
  std::string name;
  std::vector<CheckResult> checks;
  bool passed() const;
};

const std::vector<std::string>& suite_names();

/// Runs the named invariant suite (forms | decompositions | theorem1 |
/// theorem2 | theorem3 | all) on the configured problem. Randomized checks
/// draw from the config seed and are reproducible.
std::vector<SuiteResult> run_suites(const RunConfig& cfg,
                                    const std::string& which);

}  // namespace sobdecomp
