#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sheafkit {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;       // bad arguments or out-of-range indices
inline constexpr int kExitInvalid = 2;     // validation, shape or membership failure
inline constexpr int kExitInfeasible = 3;  // no factorization / not invertible / unsupported
inline constexpr int kExitParse = 4;       // unreadable or malformed input
inline constexpr int kExitInternal = 5;

/// Runs one command line (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sheafkit
