#include "civ/experiments/table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace civ::experiments {

std::size_t Table::column(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::out_of_range("table: no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
}

double Table::number(std::size_t row, const std::string& name) const {
    const Cell& c = rows.at(row).at(column(name));
    if (const auto* d = std::get_if<double>(&c)) return *d;
    if (const auto* i = std::get_if<long long>(&c)) return static_cast<double>(*i);
    throw std::invalid_argument("table: column '" + name + "' is not numeric");
}

std::string Table::text(std::size_t row, const std::string& name) const {
    return format_cell(rows.at(row).at(column(name)));
}

void Table::add(std::vector<Cell> row) {
    if (row.size() != header.size()) throw std::invalid_argument("table: row width mismatch");
    rows.push_back(std::move(row));
}

std::string format_cell(const Cell& c) {
    if (const auto* s = std::get_if<std::string>(&c)) return *s;
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    const double d = std::get<double>(c);
    if (std::isnan(d)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", d);
    return buf;
}

void write_csv(std::ostream& out, const Table& t) {
    auto quoted = [](const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char ch : s) {
            if (ch == '"') q += '"';
            q += ch;
        }
        return q + "\"";
    };
    for (std::size_t j = 0; j < t.header.size(); ++j) out << (j ? "," : "") << quoted(t.header[j]);
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << quoted(format_cell(row[j]));
        out << '\n';
    }
}

}  // namespace civ::experiments
