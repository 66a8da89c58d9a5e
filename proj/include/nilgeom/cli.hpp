#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace nilgeom::cli {

enum ExitCode : int {
  kOk = 0,
  kRuntimeFailure = 1,
  kUsage = 2,
  kMalformedInput = 3,
  kIntegrity = 4,
};

/// Runs one command line (without the program name). The human-readable
/// report goes to `out`, diagnostics to `err`.
int run(std::span<const std::string> args, std::ostream &out, std::ostream &err);

int run(int argc, const char *const *argv);

/// Parses "a:b:step" (inclusive), "a,b,c" or a single number.
std::vector<double> parse_range(const std::string &spec);

} // namespace nilgeom::cli
