#include "topamp/table.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace topamp {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void Table::add(std::vector<Cell> row) {
    if (row.size() != header.size()) throw std::logic_error("row width does not match header");
    rows.push_back(std::move(row));
}

namespace {

std::string cell_text(const Cell& c) {
    if (auto d = std::get_if<double>(&c)) return format_number(*d);
    if (auto i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    const auto& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + "\"";
}

}  // namespace

std::string Table::to_csv() const {
    std::string out;
    for (size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    out += "\n";
    for (const auto& r : rows) {
        for (size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + cell_text(r[i]);
        out += "\n";
    }
    return out;
}

}  // namespace topamp
