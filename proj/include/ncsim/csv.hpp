#ifndef NCSIM_CSV_HPP
#define NCSIM_CSV_HPP

#include <string>
#include <variant>
#include <vector>

namespace ncsim {

// Column-ordered table for file emission. Numeric cells are formatted at
// write time so the same table serializes identically at any precision.
using csv_cell = std::variant<double, long long, std::string>;

struct csv_table {
    std::vector<std::string> header;
    std::vector<std::vector<csv_cell>> rows;

    void add_row(std::vector<csv_cell> cells);
};

// One cell rendered per the writer's rules: shortest decimal form with the
// given significant digits, negative zero normalized, strings quoted only
// when they contain a delimiter, quote, or newline.
std::string format_cell(const csv_cell& cell, int precision);

// Header plus rows, comma separated, LF line endings, trailing newline.
// Writes are atomic per call: a temp file renamed over the target.
void write_csv(const csv_table& table, const std::string& path, int precision = 9);

std::string render_csv(const csv_table& table, int precision = 9);

} // namespace ncsim

#endif
