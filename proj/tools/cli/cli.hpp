#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qmt::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kMarkovViolation = 2,
  kTotalConflict = 3,
  kDeviation = 4,
};

/// Runs the `qmt` command line with `args` (program name excluded). Normal
/// output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qmt::cli
