#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ginibre::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Parses `args` (without the program name), runs the command and writes
/// the report to `out` (or the --out file); diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ginibre::cli
