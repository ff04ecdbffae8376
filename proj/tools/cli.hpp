#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wbary::cli {

enum ExitCode : int {
  kOk = 0,
  kValidationError = 1,
  kSolverError = 2,
  kConfigError = 3,
};

/// Runs the command line `args` (args[0] is the program name). Structured
/// results go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wbary::cli
