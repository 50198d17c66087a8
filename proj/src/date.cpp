#include "areacfd/date.hpp"

#include "areacfd/error.hpp"

#include <charconv>

#include <fmt/format.h>

namespace areacfd {

namespace {

int parse_field(std::string_view text, std::string_view whole) {
    int value = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw Error("date.invalid", fmt::format("not an ISO date: '{}'", whole));
    }
    return value;
}

}  // namespace

Date parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw Error("date.invalid", fmt::format("not an ISO date: '{}'", text));
    }
    const int y = parse_field(text.substr(0, 4), text);
    const int m = parse_field(text.substr(5, 2), text);
    const int d = parse_field(text.substr(8, 2), text);
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) {
        throw Error("date.invalid", fmt::format("no such calendar day: '{}'", text));
    }
    return Date{ymd};
}

std::string format_date(Date d) {
    const std::chrono::year_month_day ymd{d};
    return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                       static_cast<unsigned>(ymd.day()));
}

}  // namespace areacfd
