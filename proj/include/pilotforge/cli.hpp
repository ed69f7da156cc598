#pragma once

#include <iosfwd>

namespace pilotforge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitUsage = 64;

/// Parses argv, runs one subcommand and writes its file set.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pilotforge::cli
