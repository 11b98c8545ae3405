#pragma once

#include <string>
#include <vector>

#include "bhf/config.hpp"

namespace bhf {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Invariant suite across all modules at the configured grid (kept small
// enough to run in seconds).
std::vector<CheckResult> run_selftest(const RunConfig& cfg);

}  // namespace bhf
