#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace geocoherence {

enum ExitCode : int {
  kExitSuccess = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitInternal = 3,
};

inline constexpr const char* kSeedEnvironmentVariable = "GEOCOHERENCE_SEED";

// Runs one subcommand. `args` excludes the program name. Reports go to `out`
// (or to --output), warnings and errors to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace geocoherence
