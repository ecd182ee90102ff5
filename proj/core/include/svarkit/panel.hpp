#pragma once

#include "svarkit/calendar.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace svarkit {

struct VariableSpec {
  std::string name;
  std::string units;
  int ordering_index = 0;  // position in the recursive (Cholesky) ordering
};

/// Aligned monthly multivariate series. Columns follow the causal ordering.
/// Immutable once constructed.
class TimeSeriesPanel {
 public:
  /// Validates shape, finiteness, unique names and that the ordering indices
  /// are exactly 0..M-1 in column order.
  TimeSeriesPanel(YearMonth start, Eigen::MatrixXd values, std::vector<VariableSpec> variables);

  [[nodiscard]] YearMonth start() const { return start_; }
  [[nodiscard]] YearMonth end() const { return start_.plus_months(rows() - 1); }
  [[nodiscard]] YearMonth date(Eigen::Index row) const { return start_.plus_months(row); }
  [[nodiscard]] Eigen::Index rows() const { return values_.rows(); }
  [[nodiscard]] Eigen::Index cols() const { return values_.cols(); }
  [[nodiscard]] const Eigen::MatrixXd& values() const { return values_; }
  [[nodiscard]] const std::vector<VariableSpec>& variables() const { return variables_; }
  [[nodiscard]] std::vector<std::string> names() const;

  /// Column index of `name`; throws DataError if absent.
  [[nodiscard]] Eigen::Index column(const std::string& name) const;

 private:
  YearMonth start_;
  Eigen::MatrixXd values_;
  std::vector<VariableSpec> variables_;
};

enum class SeasonalMethod { dummy, bsm_static, bsm_evolving };

std::string to_string(SeasonalMethod method);
SeasonalMethod parse_seasonal_method(const std::string& text);

struct SeasonalFit {
  Eigen::MatrixXd monthly_means;  // 12 x M, row m-1 holds calendar month m
  SeasonalMethod method = SeasonalMethod::dummy;
};

/// Reads a delimiter-separated table with a header row whose first column is
/// `date` (YYYY-MM). Requested variables are reordered by ordering_index.
/// Empty or "NA" cells are missing: leading/trailing rows with missing cells
/// are trimmed, interior missing cells are an error.
TimeSeriesPanel load_panel(std::istream& source, std::span<const VariableSpec> spec, char delimiter = ',');

/// Writes the panel in the same format load_panel reads. Values use the
/// shortest round-trip representation, so write/load is exact.
void write_panel(std::ostream& out, const TimeSeriesPanel& panel, char delimiter = ',');

/// Subtracts per-calendar-month sample means (OLS on twelve monthly dummies)
/// from every column not named in `skip`. Skipped columns pass through and get
/// zero monthly means.
std::pair<TimeSeriesPanel, SeasonalFit> deseason_dummies(const TimeSeriesPanel& panel,
                                                         const std::set<std::string>& skip);

/// Contiguous sub-panel over [first, last].
TimeSeriesPanel restrict_window(const TimeSeriesPanel& panel, YearMonth first, YearMonth last);

}  // namespace svarkit
