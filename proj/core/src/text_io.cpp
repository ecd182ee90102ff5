#include "svarkit/text_io.hpp"

#include "svarkit/error.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <system_error>

namespace svarkit::io {

std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw Error("cannot format double");
  return std::string(buf, ptr);
}

double parse_double(std::string_view cell) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size()) {
    throw DataError("unparsable cell '" + std::string(cell) + "'");
  }
  return value;
}

std::vector<std::string> split(std::string_view line, char delimiter) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(delimiter, pos);
    out.emplace_back(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::string_view trim(std::string_view text) {
  constexpr std::string_view ws = " \t\r\n";
  const auto first = text.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(ws);
  return text.substr(first, last - first + 1);
}

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  out << m.rows() << ',' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty matrix file");
  const auto dims = split(line, ',');
  if (dims.size() != 2) throw DataError("matrix header must be 'rows,cols'");
  const auto rows = static_cast<Eigen::Index>(parse_double(dims[0]));
  const auto cols = static_cast<Eigen::Index>(parse_double(dims[1]));
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw DataError("matrix file truncated");
    const auto cells = split(line, ',');
    if (static_cast<Eigen::Index>(cells.size()) != cols) throw DataError("matrix row has wrong width");
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = parse_double(cells[j]);
  }
  return m;
}

}  // namespace svarkit::io
