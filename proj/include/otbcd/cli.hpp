#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace otbcd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNotCertified = 1;  // ran, but result incomplete or not optimal
inline constexpr int kExitUsage = 2;
inline constexpr int kExitError = 3;         // invalid instance, I/O failure, ...

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace otbcd::cli
