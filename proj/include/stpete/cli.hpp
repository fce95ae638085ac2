#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stpete::cli {

/// Process exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitUndefined = 2;

/// Runs the command line `args` (args[0] is the program name) writing results
/// to `out` and diagnostics to `err`; returns the exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stpete::cli
