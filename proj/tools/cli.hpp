#pragma once

// Command-line front end. Exit codes: 0 ok, 1 input error,
// 2 infeasible or unbounded, 3 numerical failure.

namespace socmarket::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitNumerical = 3;

int run(int argc, const char* const* argv);

}  // namespace socmarket::cli
