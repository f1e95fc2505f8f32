#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mmdim {

/// Exit codes: 0 pass, 1 verification failure, 2 usage or input error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

/// Runs the command line `args` (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mmdim
