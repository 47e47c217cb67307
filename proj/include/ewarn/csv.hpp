#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace ewarn::csv {

/// Splits one line on commas. Quoted fields may contain commas; quotes are stripped.
std::vector<std::string> split_line(std::string_view line);

/// Parses a numeric cell. Empty, "NA", "NaN" (any case) yield quiet NaN.
/// Throws DataError for anything else that is not a number.
double parse_number(std::string_view cell);

/// Shortest round-trip decimal rendering, stable across runs.
std::string format_double(double v);

/// Reads a header + rows file. The header must contain every name in
/// `required`; rows are returned with columns reordered to match `required`.
struct Table {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;
};
Table read_table(const std::filesystem::path& path, const std::vector<std::string>& required);

/// Opens for writing (creating parent directories). Throws DataError on failure.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace ewarn::csv
