#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dlab {

/// Exit codes: 0 pass / success, 1 fail, 2 inconclusive, 3 usage or input error.
inline constexpr int kExitError = 3;

/// Runs the command line (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dlab
