#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lpflow {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// The acceptance criteria, runnable at full scale or at reduced sample counts
// (quick). Thresholds and tolerances are identical in both modes; quick only
// shrinks the sweep sizes.
std::vector<CheckResult> run_verification(bool quick, std::uint64_t seed);

}  // namespace lpflow
