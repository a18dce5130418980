#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gbi::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kCheckFailed = 1;
inline constexpr int kBadArguments = 2;
inline constexpr int kNumericalFailure = 3;

/// Runs the `gbi` command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest decimal that reads back to the same double ('.' separator, no
/// locale involvement).
std::string format_double(double v);

}  // namespace gbi::cli
