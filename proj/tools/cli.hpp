#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gurevich::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { ok = 0, config_error = 1, numeric_error = 2 };

/// Runs one command line (without the program name). The result document goes
/// to `out` unless --output is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gurevich::cli
