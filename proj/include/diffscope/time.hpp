#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace diffscope {

/// UTC instant at millisecond precision.
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using Duration = std::chrono::milliseconds;

/// Parses an RFC 3339 date-time ("2015-01-23T11:00:00.250+01:00") and
/// normalizes it to UTC. Sub-millisecond digits are truncated.
/// Throws Error{BadTimestamp}.
Timestamp parse_rfc3339(std::string_view text);

/// Renders `ts` shifted by `offset_minutes`, e.g. "2015-01-23T11:00:00+01:00".
/// A zero offset renders as "Z". Milliseconds appear only when non-zero.
std::string format_rfc3339(Timestamp ts, int offset_minutes = 0);

/// "500ms", "90s", "30m", "1h", "3d" or a bare number of seconds.
/// Throws Error{InvalidConfig}.
Duration parse_duration(std::string_view text);

std::string format_duration(Duration d);

/// "+1", "-5", "+05:30", "0" → minutes. Throws Error{InvalidConfig}.
int parse_utc_offset(std::string_view text);

inline std::int64_t to_millis(Timestamp ts) { return ts.time_since_epoch().count(); }
inline Timestamp from_millis(std::int64_t ms) { return Timestamp{Duration{ms}}; }

}  // namespace diffscope
