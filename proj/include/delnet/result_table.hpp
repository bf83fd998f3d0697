#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace delnet {

using Cell = std::variant<double, std::int64_t, std::string>;

/// Rectangular CSV table with a '#'-prefixed key=value footer.
/// Numbers print with 12 significant digits.
class ResultTable {
public:
    explicit ResultTable(std::vector<std::string> columns);

    void add_row(std::vector<Cell> row);
    void add_footer(std::string key, std::string value);

    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<std::vector<Cell>>& rows() const { return rows_; }
    const std::vector<std::pair<std::string, std::string>>& footer() const { return footer_; }

    /// Numeric cell at (row, column name); throws if absent or not numeric.
    double number(std::size_t row, const std::string& column) const;

    std::string to_csv() const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<Cell>> rows_;
    std::vector<std::pair<std::string, std::string>> footer_;
};

/// printf %.12g, with "inf", "-inf" and "nan" spelled out.
std::string format_number(double value);

} // namespace delnet
