#pragma once

#include <charconv>
#include <string>

namespace logsample::detail {

/// Shortest representation that parses back to the same double.
inline std::string format_number(double value) {
    char buf[64];
    const auto result = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, result.ptr);
}

}  // namespace logsample::detail
