#pragma once

#include <iosfwd>
#include <optional>

namespace greypath::cli {

// Exit statuses beyond 0 = every check passed.
constexpr int kExitChecksFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

// Worker count: the flag if given, else GREYPATH_THREADS if set, else the
// number of logical cores. A malformed environment value is rejected with
// std::invalid_argument.
int resolve_threads(std::optional<int> flag, const char* env_value);

// Runs the command line and returns the exit status. The JSON report goes to
// out (or the --out file); diagnostics go to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace greypath::cli
