#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace sip::csv {

/// Parsed numeric CSV: header row plus a dense value matrix.
struct Table {
    std::vector<std::string> header;
    Eigen::MatrixXd values;  // rows x columns, may have zero rows
};

/// Reads a comma-separated file with a mandatory header row.  Every body
/// cell must parse fully as a finite double ('.' decimal, no quoting);
/// empty or non-numeric cells throw std::runtime_error with the location.
Table read_table(const std::string& path);

/// Writes a table with shortest round-trip decimal formatting, LF line ends.
void write_table(const std::string& path, const Table& table);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

}  // namespace sip::csv
