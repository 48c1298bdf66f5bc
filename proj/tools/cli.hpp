#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cvpctc::cli {

inline constexpr const char* kToolName = "cvpctc";
inline constexpr const char* kToolVersion = "1.0.0";
// Environment variable consulted for the default --seed.
inline constexpr const char* kSeedEnv = "CVPCTC_SEED";

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kNonHalting = 3,
  kInconsistent = 4,
};

// Runs one command line (args excludes the program name). Results go to
// `out` unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cvpctc::cli
