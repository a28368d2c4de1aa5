#pragma once

#include <string>
#include <vector>

namespace hypspec::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kConfigError = 1;
inline constexpr int kNumericalError = 2;

/// Runs one subcommand. args excludes the program name. Errors are reported
/// as a JSON object on stderr.
int run(const std::vector<std::string>& args);

}  // namespace hypspec::cli
