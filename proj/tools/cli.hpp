#pragma once

namespace scem {

/// Exit codes: 0 success, 2 configuration or contract error, 3 numerical failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Entry point of the scem command line tool. Safe to call repeatedly in
/// one process (used by the tests).
int run_cli(int argc, const char* const* argv);

}  // namespace scem
