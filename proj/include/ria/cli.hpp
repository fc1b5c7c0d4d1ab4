// Command-line front end. Exit codes: 0 success, 1 schema/usage error,
// 2 cap exceeded, 3 alignment violation.
#pragma once

namespace ria {

inline constexpr const char* kVersion = "0.1.0";

int run_cli(int argc, const char* const* argv);

}  // namespace ria
