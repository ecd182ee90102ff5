#include "svarkit/panel.hpp"

#include "svarkit/error.hpp"
#include "svarkit/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>

namespace svarkit {

TimeSeriesPanel::TimeSeriesPanel(YearMonth start, Eigen::MatrixXd values, std::vector<VariableSpec> variables)
    : start_(start), values_(std::move(values)), variables_(std::move(variables)) {
  if (values_.rows() == 0) throw DataError("panel has no observations");
  if (values_.cols() != static_cast<Eigen::Index>(variables_.size())) {
    throw DataError("panel column count does not match variable list");
  }
  if (!values_.allFinite()) throw DataError("panel contains missing or non-finite values");
  for (std::size_t j = 0; j < variables_.size(); ++j) {
    if (variables_[j].ordering_index != static_cast<int>(j)) {
      throw DataError("column order must match ordering_index (variable '" + variables_[j].name + "')");
    }
    for (std::size_t k = 0; k < j; ++k) {
      if (variables_[k].name == variables_[j].name) throw DataError("duplicate variable '" + variables_[j].name + "'");
    }
  }
}

std::vector<std::string> TimeSeriesPanel::names() const {
  std::vector<std::string> out;
  out.reserve(variables_.size());
  for (const auto& v : variables_) out.push_back(v.name);
  return out;
}

Eigen::Index TimeSeriesPanel::column(const std::string& name) const {
  for (std::size_t j = 0; j < variables_.size(); ++j) {
    if (variables_[j].name == name) return static_cast<Eigen::Index>(j);
  }
  throw DataError("unknown variable '" + name + "'");
}

std::string to_string(SeasonalMethod method) {
  switch (method) {
    case SeasonalMethod::dummy: return "dummy";
    case SeasonalMethod::bsm_static: return "bsm-static";
    case SeasonalMethod::bsm_evolving: return "bsm-evolving";
  }
  return "unknown";
}

SeasonalMethod parse_seasonal_method(const std::string& text) {
  if (text == "dummy") return SeasonalMethod::dummy;
  if (text == "bsm-static") return SeasonalMethod::bsm_static;
  if (text == "bsm-evolving") return SeasonalMethod::bsm_evolving;
  throw DataError("unknown deseasonalization method '" + text + "'");
}

namespace {

bool is_missing(std::string_view cell) {
  cell = io::trim(cell);
  return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan";
}

std::vector<VariableSpec> sorted_by_ordering(std::span<const VariableSpec> spec) {
  std::vector<VariableSpec> vars(spec.begin(), spec.end());
  std::sort(vars.begin(), vars.end(),
            [](const VariableSpec& a, const VariableSpec& b) { return a.ordering_index < b.ordering_index; });
  for (std::size_t j = 0; j < vars.size(); ++j) {
    if (vars[j].ordering_index != static_cast<int>(j)) {
      throw DataError("ordering indices must form a permutation of 0..M-1");
    }
  }
  return vars;
}

}  // namespace

TimeSeriesPanel load_panel(std::istream& source, std::span<const VariableSpec> spec, char delimiter) {
  if (spec.empty()) throw DataError("no variables requested");
  auto vars = sorted_by_ordering(spec);

  std::string line;
  if (!std::getline(source, line)) throw DataError("empty input");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = io::split(line, delimiter);
  if (header.empty() || io::trim(header[0]) != "date") throw DataError("first header column must be 'date'");

  std::vector<std::size_t> source_col(vars.size());
  for (std::size_t j = 0; j < vars.size(); ++j) {
    auto it = std::find_if(header.begin() + 1, header.end(),
                           [&](const std::string& h) { return io::trim(h) == vars[j].name; });
    if (it == header.end()) throw DataError("unknown variable '" + vars[j].name + "'");
    source_col[j] = static_cast<std::size_t>(it - header.begin());
  }

  std::vector<YearMonth> dates;
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(source, line)) {
    ++line_no;
    if (io::trim(line).empty()) continue;
    const auto cells = io::split(line, delimiter);
    const auto date = parse_year_month(io::trim(cells[0]));
    if (!dates.empty() && date != dates.back().plus_months(1)) {
      throw DataError("non-contiguous months at line " + std::to_string(line_no) + " (" +
                      format_year_month(date) + " after " + format_year_month(dates.back()) + ")");
    }
    std::vector<double> row(vars.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t j = 0; j < vars.size(); ++j) {
      if (source_col[j] >= cells.size() || is_missing(cells[source_col[j]])) continue;
      try {
        row[j] = io::parse_double(cells[source_col[j]]);
      } catch (const DataError& e) {
        throw DataError(std::string(e.what()) + " at line " + std::to_string(line_no));
      }
    }
    dates.push_back(date);
    rows.push_back(std::move(row));
  }

  auto complete = [](const std::vector<double>& r) {
    return std::all_of(r.begin(), r.end(), [](double v) { return std::isfinite(v); });
  };
  std::size_t first = 0;
  while (first < rows.size() && !complete(rows[first])) ++first;
  std::size_t last = rows.size();
  while (last > first && !complete(rows[last - 1])) --last;
  if (first == last) throw DataError("no complete observations for the requested variables");
  for (std::size_t t = first; t < last; ++t) {
    if (!complete(rows[t])) {
      throw DataError("missing value inside the sample at " + format_year_month(dates[t]));
    }
  }

  Eigen::MatrixXd values(static_cast<Eigen::Index>(last - first), static_cast<Eigen::Index>(vars.size()));
  for (std::size_t t = first; t < last; ++t) {
    for (std::size_t j = 0; j < vars.size(); ++j) values(static_cast<Eigen::Index>(t - first), j) = rows[t][j];
  }
  return TimeSeriesPanel(dates[first], std::move(values), std::move(vars));
}

void write_panel(std::ostream& out, const TimeSeriesPanel& panel, char delimiter) {
  out << "date";
  for (const auto& v : panel.variables()) out << delimiter << v.name;
  out << '\n';
  for (Eigen::Index t = 0; t < panel.rows(); ++t) {
    out << format_year_month(panel.date(t));
    for (Eigen::Index j = 0; j < panel.cols(); ++j) out << delimiter << io::format_double(panel.values()(t, j));
    out << '\n';
  }
}

std::pair<TimeSeriesPanel, SeasonalFit> deseason_dummies(const TimeSeriesPanel& panel,
                                                         const std::set<std::string>& skip) {
  const auto T = panel.rows();
  const auto M = panel.cols();
  SeasonalFit fit{Eigen::MatrixXd::Zero(12, M), SeasonalMethod::dummy};
  Eigen::MatrixXd out = panel.values();
  for (Eigen::Index j = 0; j < M; ++j) {
    if (skip.contains(panel.variables()[j].name)) continue;
    for (int m = 0; m < 12; ++m) {
      // Rows falling in calendar month m+1.
      const auto offset = (m - (panel.start().month - 1) + 12) % 12;
      double sum = 0.0;
      Eigen::Index count = 0;
      for (Eigen::Index t = offset; t < T; t += 12) {
        sum += panel.values()(t, j);
        ++count;
      }
      if (count == 0) continue;
      const double mean = sum / static_cast<double>(count);
      fit.monthly_means(m, j) = mean;
      for (Eigen::Index t = offset; t < T; t += 12) out(t, j) -= mean;
    }
  }
  return {TimeSeriesPanel(panel.start(), std::move(out), panel.variables()), std::move(fit)};
}

TimeSeriesPanel restrict_window(const TimeSeriesPanel& panel, YearMonth first, YearMonth last) {
  if (last < first) throw DataError("empty window: end before start");
  if (first < panel.start() || last > panel.end()) {
    throw DataError("window " + format_year_month(first) + ".." + format_year_month(last) + " outside panel range " +
                    format_year_month(panel.start()) + ".." + format_year_month(panel.end()));
  }
  const auto offset = months_between(panel.start(), first);
  const auto length = months_between(first, last) + 1;
  return TimeSeriesPanel(first, panel.values().middleRows(offset, length), panel.variables());
}

}  // namespace svarkit
