#include "sip/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace sip::csv {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return cells;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
        std::ostringstream msg;
        msg << "csv: cell at row " << row << ", column " << col << " is not a finite number: '"
            << cell << "'";
        throw std::runtime_error(msg.str());
    }
    return value;
}

}  // namespace

Table read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("csv: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("csv: missing header row in '" + path + "'");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    Table table;
    table.header = split_line(line);
    if (table.header.empty() || table.header[0].empty())
        throw std::runtime_error("csv: empty header in '" + path + "'");

    std::vector<std::vector<double>> rows;
    std::size_t row_no = 1;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != table.header.size()) {
            std::ostringstream msg;
            msg << "csv: row " << row_no << " has " << cells.size() << " cells, expected "
                << table.header.size();
            throw std::runtime_error(msg.str());
        }
        std::vector<double> parsed(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) parsed[c] = parse_cell(cells[c], row_no, c + 1);
        rows.push_back(std::move(parsed));
        ++row_no;
    }
    table.values.resize(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(table.header.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return table;
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::runtime_error("csv: double formatting failed");
    return std::string(buf, ptr);
}

void write_table(const std::string& path, const Table& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("csv: cannot write '" + path + "'");
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (c > 0) out << ',';
        out << table.header[c];
    }
    out << '\n';
    for (Eigen::Index r = 0; r < table.values.rows(); ++r) {
        for (Eigen::Index c = 0; c < table.values.cols(); ++c) {
            if (c > 0) out << ',';
            out << format_double(table.values(r, c));
        }
        out << '\n';
    }
}

}  // namespace sip::csv
