#include "csv.hpp"

#include "areacfd/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

namespace areacfd::detail {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.emplace_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

}  // namespace

std::vector<CsvRow> read_csv(const std::filesystem::path& path, std::span<const std::string_view> header) {
    std::ifstream in(path);
    if (!in) {
        throw Error("market.missing_file", fmt::format("cannot open {}", path.string()));
    }
    const auto name = path.filename().string();

    std::string line;
    std::size_t line_no = 0;
    bool seen_header = false;
    std::vector<CsvRow> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        auto fields = split(line);
        if (!seen_header) {
            if (fields.size() != header.size() || !std::equal(fields.begin(), fields.end(), header.begin())) {
                throw Error("market.bad_header", fmt::format("{}: expected header '{}'", name, fmt::join(header, ",")));
            }
            seen_header = true;
            continue;
        }
        if (fields.size() != header.size()) {
            throw Error("market.malformed_row",
                        fmt::format("{}:{}: expected {} fields, got {}", name, line_no, header.size(), fields.size()));
        }
        rows.push_back({line_no, std::move(fields)});
    }
    if (!seen_header) {
        throw Error("market.bad_header", fmt::format("{}: missing header row", name));
    }
    return rows;
}

double parse_number(std::string_view text, std::string_view where) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        throw Error("market.malformed_row", fmt::format("{}: not a number: '{}'", where, text));
    }
    return value;
}

bool parse_bool(std::string_view text, std::string_view where) {
    if (text == "true") {
        return true;
    }
    if (text == "false") {
        return false;
    }
    throw Error("market.malformed_row", fmt::format("{}: expected true/false, got '{}'", where, text));
}

}  // namespace areacfd::detail
