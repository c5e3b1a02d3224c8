#pragma once

#include <iosfwd>

namespace hdna {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDifferent = 2;  // diff found changes / watch raised an alert
inline constexpr int kExitUsage = 64;
inline constexpr int kExitDataErr = 65;   // input could not be decoded
inline constexpr int kExitFetch = 68;
inline constexpr int kExitIo = 74;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hdna
