#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fracmax::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

/// Runs the fracmax command line. `args` excludes the program name. Report
/// output addressed to "-" goes to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fracmax::cli
