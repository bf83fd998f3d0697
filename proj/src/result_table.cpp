#include "delnet/result_table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "delnet/errors.hpp"

namespace delnet {

namespace {

std::string quote(const std::string& s)
{
    if (s.find_first_of(",\"\n\r") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + '"';
}

} // namespace

std::string format_number(double value)
{
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    if (value == 0.0)
        return "0";  // folds -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

ResultTable::ResultTable(std::vector<std::string> columns) : columns_(std::move(columns))
{
    if (columns_.empty())
        throw InputError("result table needs at least one column");
}

void ResultTable::add_row(std::vector<Cell> row)
{
    if (row.size() != columns_.size())
        throw InputError("result row has " + std::to_string(row.size()) + " cells for " +
                         std::to_string(columns_.size()) + " columns");
    rows_.push_back(std::move(row));
}

void ResultTable::add_footer(std::string key, std::string value)
{
    footer_.emplace_back(std::move(key), std::move(value));
}

double ResultTable::number(std::size_t row, const std::string& column) const
{
    const auto it = std::find(columns_.begin(), columns_.end(), column);
    if (it == columns_.end())
        throw InputError("no column '" + column + "'");
    const Cell& cell = rows_.at(row)[static_cast<std::size_t>(it - columns_.begin())];
    if (const auto* d = std::get_if<double>(&cell))
        return *d;
    if (const auto* i = std::get_if<std::int64_t>(&cell))
        return static_cast<double>(*i);
    throw InputError("column '" + column + "' is not numeric");
}

std::string ResultTable::to_csv() const
{
    std::string out;
    for (std::size_t c = 0; c < columns_.size(); ++c)
        out += (c ? "," : "") + quote(columns_[c]);
    out += '\n';
    for (const auto& row : rows_) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c)
                out += ',';
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>)
                        out += format_number(v);
                    else if constexpr (std::is_same_v<T, std::int64_t>)
                        out += std::to_string(v);
                    else
                        out += quote(v);
                },
                row[c]);
        }
        out += '\n';
    }
    for (const auto& [key, value] : footer_)
        out += "# " + key + "=" + value + "\n";
    return out;
}

} // namespace delnet
