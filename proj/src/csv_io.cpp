#include "qhlab/csv_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qhlab/errors.hpp"

namespace qhlab {

std::size_t CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw UsageError("csv: no column named '" + name + "'");
}

std::vector<double> CsvTable::column(const std::string& name) const {
    const std::size_t idx = column_index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(row[idx]);
    return out;
}

std::string format_value(double v) {
    if (v == 0.0) return "0";  // including the negative zero
    char buf[40];
    for (int precision = 15; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("csv: cannot open '" + path.string() + "' for writing");
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out << ',';
        out << table.columns[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size())
            throw ConfigError("csv: row width does not match header in '" + path.string() + "'");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << format_value(row[i]);
        }
        out << '\n';
    }
    if (!out) throw ConfigError("csv: write failed for '" + path.string() + "'");
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("csv: cannot open '" + path.string() + "'");
    CsvTable table;
    std::string line;
    if (!std::getline(in, line) || line.empty())
        throw UsageError("csv: '" + path.string() + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    table.columns = split_fields(line);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_fields(line);
        if (cells.size() != table.columns.size())
            throw UsageError("csv: ragged row in '" + path.string() + "'");
        std::vector<double> row;
        row.reserve(cells.size());
        for (const std::string& cell : cells) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0')
                throw UsageError("csv: non-numeric cell '" + cell + "' in '" + path.string() +
                                 "'");
            row.push_back(v);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace qhlab
