#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nfr::app {

enum ExitCode : int {
  kSuccess = 0,
  kFailure = 1,
  kUsage = 2,
  kIo = 3,
  kNumeric = 4,
};

/// Runs `nfr <subcommand> [flags]`; args excludes the program name. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nfr::app
