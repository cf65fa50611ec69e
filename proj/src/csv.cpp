#include "hsmff/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hsmff/errors.hpp"

namespace hsmff::csv {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write(const std::string& path, const Table& table) {
    std::vector<std::span<const double>> cols;
    cols.reserve(table.columns.size());
    for (const auto& c : table.columns) cols.emplace_back(c);
    write_columns(path, table.header, cols);
}

void write_columns(const std::string& path, std::span<const std::string> header,
                   std::span<const std::span<const double>> columns) {
    if (header.size() != columns.size())
        throw IoError("csv: header/column count mismatch for " + path);
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (const auto& c : columns)
        if (c.size() != rows) throw IoError("csv: ragged columns for " + path);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("csv: cannot open for writing: " + path);

    std::string line;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j) line += ',';
        line += header[j];
    }
    line += '\n';
    out << line;

    for (std::size_t i = 0; i < rows; ++i) {
        line.clear();
        for (std::size_t j = 0; j < columns.size(); ++j) {
            if (j) line += ',';
            line += format_double(columns[j][i]);
        }
        line += '\n';
        out << line;
    }
    if (!out) throw IoError("csv: write failed: " + path);
}

Table read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("csv: cannot open for reading: " + path);

    Table table;
    std::string line;
    if (!std::getline(in, line)) throw IoError("csv: empty file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) table.header.push_back(cell);
    table.columns.resize(table.header.size());

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t col = 0;
        const char* p = line.c_str();
        while (*p) {
            char* end = nullptr;
            const double v = std::strtod(p, &end);
            if (end == p)
                throw IoError("csv: bad number at line " + std::to_string(lineno) +
                              " in " + path);
            if (col >= table.columns.size())
                throw IoError("csv: too many fields at line " + std::to_string(lineno) +
                              " in " + path);
            table.columns[col++].push_back(v);
            p = end;
            if (*p == ',') ++p;
            else if (*p != '\0')
                throw IoError("csv: unexpected character at line " +
                              std::to_string(lineno) + " in " + path);
        }
        if (col != table.columns.size())
            throw IoError("csv: short row at line " + std::to_string(lineno) + " in " + path);
    }
    return table;
}

} // namespace hsmff::csv
