#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace topamp {

// Round-trip exact text for a double (17 significant digits).
std::string format_number(double v);

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
    std::string to_csv() const;
};

}  // namespace topamp
