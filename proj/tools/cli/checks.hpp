#pragma once

// The identity suite run by `decohere verify`. Every number reported here is
// recomputed from the scenario; nothing is read back from solver state.

#include <string>
#include <string_view>
#include <vector>

#include "decohere/scenario.hpp"

namespace decohere::cli {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string note;
  double seconds = 0.0;
};

/// Throws SchemaError for a name outside kCheckNames.
CheckResult run_check(std::string_view name, const ScenarioFile& file);

/// The checks listed in file.run, or all of them when the list is empty.
std::vector<CheckResult> run_checks(const ScenarioFile& file);

}  // namespace decohere::cli
