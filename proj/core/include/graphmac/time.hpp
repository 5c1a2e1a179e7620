#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace graphmac {

using Timestamp = std::chrono::sys_seconds;

// Source of "now" for every timestamp-consuming operation. Pinning it makes
// compiled and signed artifacts reproducible.
using Clock = std::function<Timestamp()>;

Clock system_clock();
Clock fixed_clock(Timestamp at);

// RFC 3339 in UTC with a trailing 'Z', e.g. 2026-01-01T00:00:00Z.
std::string format_rfc3339(Timestamp t);

// Accepts "YYYY-MM-DDTHH:MM:SS" followed by optional fractional seconds
// (truncated) and either 'Z' or a +hh:mm / -hh:mm offset.
std::optional<Timestamp> parse_rfc3339(std::string_view text);

}  // namespace graphmac
