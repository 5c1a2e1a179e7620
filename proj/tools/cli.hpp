#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace graphmac::cli {

// Exit codes shared by every subcommand.
inline constexpr int kOk = 0;        // success, ALLOW, verification pass
inline constexpr int kDenied = 1;    // DENY, verification fail, signature mismatch
inline constexpr int kUsage = 2;     // bad arguments or unparsable input (also PDP ERROR)
inline constexpr int kInternal = 3;  // workspace state and environment failures

// `args` excludes the program name. Data goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace graphmac::cli
