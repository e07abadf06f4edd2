#pragma once

#include <string>
#include <vector>

namespace infotrans::cli {

// Parses and executes one invocation (argv without the program name).
// Exit codes: 0 success, 1 validation/configuration error, 2 numerical
// failure (blow-up, diverged iteration). Diagnostics go to stdout as JSON
// lines; errors to stderr as a single JSON line.
int run(std::vector<std::string> args);

} // namespace infotrans::cli
