#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace areacfd {

using Date = std::chrono::sys_days;

/// Parses a strict ISO-8601 calendar date ("2010-03-15").
/// Throws Error("date.invalid") on anything else.
Date parse_date(std::string_view text);

std::string format_date(Date d);

/// Inclusive calendar range.
struct DateRange {
    Date first;
    Date last;

    bool contains(Date d) const { return first <= d && d <= last; }
    bool operator==(const DateRange&) const = default;
};

inline bool is_weekend(Date d) {
    const std::chrono::weekday wd{d};
    return wd == std::chrono::Saturday || wd == std::chrono::Sunday;
}

}  // namespace areacfd
