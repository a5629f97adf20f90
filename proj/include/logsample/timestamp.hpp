#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace logsample {

/// UTC instant at second precision.
using Timestamp = std::chrono::sys_seconds;

inline constexpr std::string_view kDefaultTimestampFormat = "%Y-%m-%d %H:%M";

/// Parses `text` with a strftime-style `format`. The whole string must be
/// consumed. Falls back to ISO-8601 when the format does not match, so files
/// written with second precision stay readable under the minute default.
std::optional<Timestamp> parse_timestamp(std::string_view text,
                                         std::string_view format = kDefaultTimestampFormat);

/// ISO-8601 / XES date: `YYYY-MM-DD[T ]HH:MM[:SS[.fff]][Z|+hh:mm|-hh:mm]`.
/// Fractional seconds are truncated; offsets are folded into UTC.
std::optional<Timestamp> parse_iso8601(std::string_view text);

/// `YYYY-MM-DD HH:MM:SS` in UTC.
std::string format_timestamp(Timestamp t);

inline double seconds_between(Timestamp from, Timestamp to) {
    return static_cast<double>((to - from).count());
}

}  // namespace logsample
