#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace infoflow {

/// UTC instant at second resolution.
using Timestamp = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;

inline constexpr Seconds kMinute{60};
inline constexpr Seconds kHour{3600};
inline constexpr Seconds kDay{86400};

inline Timestamp from_unix(std::int64_t s) { return Timestamp{Seconds{s}}; }
inline std::int64_t to_unix(Timestamp t) { return t.time_since_epoch().count(); }

/// Truncates toward zero to the enclosing minute (toward -inf for pre-epoch).
Timestamp floor_minute(Timestamp t);

/// Parses ISO-8601 UTC: "YYYY-MM-DDTHH:MM[:SS[.fff]]" with optional "Z" or
/// "+00:00" suffix; a space may replace 'T'. Fractional seconds are truncated.
/// Throws Error{ParseError} on malformed input or a non-UTC offset.
Timestamp parse_iso8601(std::string_view text);

/// Formats as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601(Timestamp t);

inline double to_days(Seconds d) { return static_cast<double>(d.count()) / 86400.0; }
inline double to_hours(Seconds d) { return static_cast<double>(d.count()) / 3600.0; }

/// Parses a compact duration: "30min", "2h", "7d", "45s", "5m" or a bare
/// number of seconds.
Seconds parse_duration(std::string_view text);

/// Canonical short label used as JSON keys: 30min, 2h, 24h, 7d, 90s.
std::string format_duration(Seconds d);

}  // namespace infoflow
