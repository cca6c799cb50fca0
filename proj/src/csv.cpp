#include "ncsim/csv.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

#include "ncsim/errors.hpp"

namespace ncsim {

void csv_table::add_row(std::vector<csv_cell> cells) {
    require(cells.size() == header.size(), error_kind::invalid_input,
            "csv row width does not match the header");
    rows.push_back(std::move(cells));
}

namespace {

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

std::string format_cell(const csv_cell& cell, int precision) {
    if (const auto* d = std::get_if<double>(&cell)) {
        double v = *d;
        if (v == 0.0) v = 0.0; // collapse -0
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        return buf;
    }
    if (const auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
    return quote_if_needed(std::get<std::string>(cell));
}

std::string render_csv(const csv_table& table, int precision) {
    require(precision >= 1 && precision <= 17, error_kind::invalid_input,
            "csv precision must be in [1, 17]");
    std::string out;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (c) out += ',';
        out += quote_if_needed(table.header[c]);
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += format_cell(row[c], precision);
        }
        out += '\n';
    }
    return out;
}

void write_csv(const csv_table& table, const std::string& path, int precision) {
    std::string body = render_csv(table, precision);
    std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        require(f.good(), error_kind::io, "cannot open " + tmp + " for writing");
        f.write(body.data(), (std::streamsize)body.size());
        require(f.good(), error_kind::io, "short write to " + tmp);
    }
    require(std::rename(tmp.c_str(), path.c_str()) == 0, error_kind::io,
            "cannot move " + tmp + " into place");
}

} // namespace ncsim
