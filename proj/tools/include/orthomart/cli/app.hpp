#pragma once

#include <iosfwd>

namespace orthomart::cli {

enum ExitCode : int {
  kSuccess = 0,
  kInternalError = 1,
  kConfigError = 2,
  kViolation = 3,
  kResourceBudget = 4,
};

/// Parses the command line, runs the subcommand and writes its reports.
/// Returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace orthomart::cli
