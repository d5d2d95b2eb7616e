#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace civ::experiments {

using Cell = std::variant<std::string, double, long long>;

/// A rectangular result table; every experiment reduces to one.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;

    [[nodiscard]] std::size_t column(const std::string& name) const;
    [[nodiscard]] double number(std::size_t row, const std::string& name) const;
    [[nodiscard]] std::string text(std::size_t row, const std::string& name) const;
    void add(std::vector<Cell> row);
};

/// Doubles are written with 10 significant digits so output is byte-stable.
[[nodiscard]] std::string format_cell(const Cell& c);
void write_csv(std::ostream& out, const Table& t);

}  // namespace civ::experiments
