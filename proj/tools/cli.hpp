#pragma once

#include <iosfwd>

namespace yamabe::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDegenerated = 2;
inline constexpr int kExitCheckFailed = 3;

/// Entry point of the `yamabe` tool; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace yamabe::cli
