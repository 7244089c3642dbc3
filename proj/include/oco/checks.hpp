#pragma once

#include <string>
#include <vector>

#include "oco/geometry.hpp"

namespace oco {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Named invariant suites. Each is self-contained and deterministic for a
// fixed seed. The parameterized variants exist so faults (for example
// letting a probe radius exceed the shrink amount) are demonstrably caught.
CheckResult check_projection(std::uint64_t seed = 11, int trials = 1000);
CheckResult check_membership(std::uint64_t seed = 12, double alpha = 0.2,
                             double delta = 0.2, int trials = 10000);
CheckResult check_sampler(std::uint64_t seed = 13, int samples = 100000);
CheckResult check_estimator_mean(std::uint64_t seed = 14, int samples = 100000);
CheckResult check_estimator_bounds(std::uint64_t seed = 15,
                                   int samples = 100000);
CheckResult check_smoothing(std::uint64_t seed = 16, int samples = 200000);
CheckResult check_coupling(std::uint64_t seed = 17, int horizon = 64);
CheckResult check_quadratization(std::uint64_t seed = 18, int trials = 2000);

std::vector<CheckResult> run_all_checks();
std::vector<std::string> check_suite_names();
// Runs one suite by name; throws std::invalid_argument for unknown names.
CheckResult run_check(const std::string& name);

}  // namespace oco
