#pragma once

#include <span>
#include <string>
#include <vector>

namespace hsmff::csv {

// Formats a double with 17 significant digits so that the text round-trips
// bit-exactly back to the same binary64 value.
std::string format_double(double v);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns; // one vector per header entry

    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

// RFC-4180-style numeric CSV: '.' decimal point, no locale, '\n' line ends.
void write(const std::string& path, const Table& table);
Table read(const std::string& path);

// Convenience for writing parallel columns without building a Table.
void write_columns(const std::string& path, std::span<const std::string> header,
                   std::span<const std::span<const double>> columns);

} // namespace hsmff::csv
