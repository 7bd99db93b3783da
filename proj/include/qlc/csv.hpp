#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace qlc {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const;  // throws std::out_of_range
    double number(std::size_t row, std::string_view name) const;
};

/// Shortest decimal text that reads back to the same double ('.' separator,
/// locale independent).
std::string format_number(double v);
std::string format_number(long v);

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string csv_quote(std::string_view field);

void write_csv(std::ostream& out, const CsvTable& table);
std::string to_csv(const CsvTable& table);

/// RFC 4180 reader; the first record is the header. Throws std::runtime_error
/// on unterminated quotes or ragged rows.
CsvTable read_csv(std::istream& in);
CsvTable parse_csv(std::string_view text);

}  // namespace qlc
