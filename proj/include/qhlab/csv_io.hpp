#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace qhlab {

// All-numeric table with a named header row. Values round-trip through text
// at 17 significant digits, so written files reproduce doubles exactly.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    // Index of a header name; throws UsageError naming the column if absent.
    std::size_t column_index(const std::string& name) const;
    std::vector<double> column(const std::string& name) const;
};

// Shortest-exact decimal text for a double ("%.17g", trimmed via round-trip).
std::string format_value(double v);

// Writes header + rows, comma-separated, '\n' line ends, locale-independent.
// Throws ConfigError if a row width disagrees with the header or the file
// cannot be opened.
void write_csv(const std::filesystem::path& path, const CsvTable& table);

// Parses a file written by write_csv (or hand-made in the same shape).
// Throws UsageError on a missing/empty file, a ragged row, or a non-numeric
// cell.
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace qhlab
