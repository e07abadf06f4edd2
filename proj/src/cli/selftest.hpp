#pragma once

#include <cstdint>
#include <functional>

#include <json.hpp>

namespace infotrans::cli {

using Emit = std::function<void(const nlohmann::json&)>;

// Seeded invariant suites. Each check emits one line
//   {"event":"check","name":...,"value":...,"threshold":...,"pass":...}
// and the return value counts failures.

int run_selftest(std::uint64_t seed, const Emit& emit);

// The matrix-only subset, with a configurable case count (the full suites).
int run_matrix_check(std::uint64_t seed, int cases, const Emit& emit);

} // namespace infotrans::cli
