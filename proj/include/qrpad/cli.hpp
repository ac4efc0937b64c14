#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qrpad {

enum ExitCode : int {
  kExitOk = 0,
  kExitBlocked = 2,
  kExitInputError = 3,
  kExitInvariantViolation = 4,
};

/// Runs one subcommand (example | embed | simulate | validate). `args` excludes
/// the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qrpad
