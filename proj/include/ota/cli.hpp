#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ota {

// Process exit codes of the `ota` tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitIo = 3,
  kExitSolver = 4,
  kExitProblem = 5,  // UNBALANCED / TOO_LARGE
};

// Runs one CLI invocation; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ota
