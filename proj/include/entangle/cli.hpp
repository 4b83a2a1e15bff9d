#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace entangle::cli {

enum ExitCode : int {
  kSuccess = 0,
  kMalformedInput = 2,
  kInvalidParameter = 3,
  kInternalFailure = 4,
  kInvalidTree = 5,
};

/// Runs the command line `args` (without the program name). The JSON report
/// goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace entangle::cli
