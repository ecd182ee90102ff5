#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace svarkit::io {

/// Shortest decimal text that parses back to the identical double.
std::string format_double(double value);

/// Parses a full cell as a double. Throws DataError on trailing garbage.
double parse_double(std::string_view cell);

std::vector<std::string> split(std::string_view line, char delimiter);

std::string_view trim(std::string_view text);

/// Plain numeric matrix: one row per line, comma separated, no header.
void write_matrix(std::ostream& out, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix(std::istream& in);

}  // namespace svarkit::io
