#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hurl::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 2,
  kExitNumeric = 3,
  kExitProperty = 4,
};

/// Runs one invocation. `args` excludes the program name. Human-readable
/// summaries go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hurl::cli
