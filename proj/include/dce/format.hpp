#pragma once

// Locale-independent number formatting for CSV and reports.

#include <charconv>
#include <string>
#include <system_error>

namespace dce {

/// Shortest decimal text that round-trips to the same double, '.' as the
/// decimal separator.
inline std::string format_number(double x) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc{}) return "nan";
    return {buf, end};
}

}  // namespace dce
