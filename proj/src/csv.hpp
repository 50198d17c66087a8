#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace areacfd::detail {

struct CsvRow {
    std::size_t line = 0;
    std::vector<std::string> fields;
};

/// Reads a comma-separated file whose first line must equal `header`.
/// Blank lines are skipped; fields are whitespace-trimmed. No quoting.
std::vector<CsvRow> read_csv(const std::filesystem::path& path, std::span<const std::string_view> header);

double parse_number(std::string_view text, std::string_view where);
bool parse_bool(std::string_view text, std::string_view where);

}  // namespace areacfd::detail
