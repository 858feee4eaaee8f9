#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace toolseek::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// `args` excludes the program name. Data goes to `out`, diagnostics to
// `err`; the return value is the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace toolseek::cli
