#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace ueval::cli {

/// Exit codes: 0 success, 2 usage or validation error, 1 unexpected failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `uncertain-eval` tool; `args` excludes the program name.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace ueval::cli
