#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace decohere::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kSchema = 2,
  kDimensionCap = 3,
  kNonConvergence = 4,
  kCheckFailed = 5,
  kInvalidState = 6,
};

/// Runs `decohere <args...>` (args excludes the program name) and returns
/// the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

/// Fixed CSV header for simulate output.
const std::string& csv_header();

}  // namespace decohere::cli
