#pragma once

// Self-check battery behind `chase_escape verify`: deterministic oracle
// comparisons plus a small seeded statistical suite.

#include <string>
#include <vector>

namespace chase {

struct CheckResult {
  std::string name;
  std::string reference;  ///< which result the check exercises
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs every check. `fast` shrinks the statistical suite and the enumeration
/// depth; all checks stay seeded and reproducible.
std::vector<CheckResult> run_verification(bool fast);

}  // namespace chase
