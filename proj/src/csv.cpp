#include "qlc/csv.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qlc {

std::size_t CsvTable::column(std::string_view name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::out_of_range("no CSV column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - header.begin());
}

double CsvTable::number(std::size_t row, std::string_view name) const {
    const std::string& s = rows.at(row).at(column(name));
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw std::runtime_error("CSV field '" + s + "' is not a number");
    return v;
}

std::string format_number(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string format_number(long v) { return std::to_string(v); }

std::string csv_quote(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

namespace {
void write_record(std::ostream& out, const std::vector<std::string>& rec) {
    for (std::size_t i = 0; i < rec.size(); ++i) {
        if (i) out << ',';
        out << csv_quote(rec[i]);
    }
    out << "\r\n";
}
}  // namespace

void write_csv(std::ostream& out, const CsvTable& table) {
    write_record(out, table.header);
    for (const auto& r : table.rows) {
        if (r.size() != table.header.size()) throw std::logic_error("CSV row width differs from header");
        write_record(out, r);
    }
}

std::string to_csv(const CsvTable& table) {
    std::ostringstream ss;
    write_csv(ss, table);
    return ss.str();
}

CsvTable parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> rec;
    std::string field;
    bool quoted = false, field_started = false;
    std::size_t i = 0;
    auto end_record = [&] {
        rec.push_back(std::move(field));
        field.clear();
        records.push_back(std::move(rec));
        rec.clear();
        field_started = false;
    };
    while (i < text.size()) {
        const char ch = text[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += ch;
            }
        } else if (ch == '"' && field.empty()) {
            quoted = true;
            field_started = true;
        } else if (ch == ',') {
            rec.push_back(std::move(field));
            field.clear();
            field_started = true;
        } else if (ch == '\r' || ch == '\n') {
            if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            end_record();
        } else {
            field += ch;
            field_started = true;
        }
        ++i;
    }
    if (quoted) throw std::runtime_error("CSV: unterminated quoted field");
    if (field_started || !rec.empty()) end_record();

    CsvTable t;
    if (records.empty()) return t;
    t.header = std::move(records.front());
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != t.header.size())
            throw std::runtime_error("CSV: record " + std::to_string(r + 1) + " has " +
                                     std::to_string(records[r].size()) + " fields, expected " +
                                     std::to_string(t.header.size()));
        t.rows.push_back(std::move(records[r]));
    }
    return t;
}

CsvTable read_csv(std::istream& in) {
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return parse_csv(text);
}

}  // namespace qlc
