#pragma once

#include "svarkit/bvar.hpp"
#include "svarkit/calendar.hpp"
#include "svarkit/stats.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace svarkit::scenario {

enum class ShockMode {
  zero,     // conditional-mean paths; spread comes from coefficient draws only
  sampled,  // unconditioned structural shocks drawn N(0, I) each step
};

/// Hard condition: variable follows `targets` at horizons 1..targets.size().
struct ConditionPath {
  int variable = 0;
  Eigen::VectorXd targets;
};

struct FrozenLevel {
  int variable = 0;
  double level = 0.0;
};

struct ForecastSetup {
  Eigen::MatrixXd history;   // >= P rows, last row is the forecast origin
  YearMonth first_date;      // date of horizon 1
  int horizon = 1;
  double trend_index = 0.0;  // trend regressor value at horizon 1 (only used by trend models)
  ShockMode shock_mode = ShockMode::zero;
  std::uint64_t seed = 0;
  bool record_shocks = true;
};

struct ScenarioResult {
  YearMonth first_date;
  std::vector<Eigen::MatrixXd> paths;   // per draw, H x M
  std::vector<Eigen::MatrixXd> shocks;  // per draw, H x M structural shocks used (if recorded)

  [[nodiscard]] stats::Bands fan(std::vector<double> probs = {0.05, 0.25, 0.5, 0.75, 0.95}) const;
};

/// Iterates y_{t+1} = c + sum_p Phi_p y_{t+1-p} (+ C eps) per draw.
ScenarioResult unconditional_forecast(const bvar::CoefficientDraws& draws, const Eigen::MatrixXd& impact,
                                      const ForecastSetup& setup);

/// Each step, the conditioned variables' own structural shocks are solved so
/// they hit their targets exactly; other shocks are zero or sampled.
/// Throws DataError for duplicate or out-of-range variables and NumericalError
/// for a singular restricted impact block.
ScenarioResult conditional_forecast(const bvar::CoefficientDraws& draws, const Eigen::MatrixXd& impact,
                                    const ForecastSetup& setup, std::span<const ConditionPath> conditions);

/// Conditional forecast with frozen variables held at constant levels.
ScenarioResult frozen_channel_forecast(const bvar::CoefficientDraws& draws, const Eigen::MatrixXd& impact,
                                       const ForecastSetup& setup, std::span<const ConditionPath> conditions,
                                       std::span<const FrozenLevel> frozen);

/// Zero-shock iteration from the first P rows of `initial` over `span` rows.
/// Rows 0..P-1 of the result are the initial observations; the trend
/// regressor at row t equals t.
Eigen::MatrixXd deterministic_component(const bvar::VarCoefficients& coeffs, const Eigen::MatrixXd& initial,
                                        Eigen::Index span);

/// Mean over draws of the per-draw deterministic components.
Eigen::MatrixXd deterministic_component(const bvar::CoefficientDraws& draws, const Eigen::MatrixXd& initial,
                                        Eigen::Index span);

/// Index of the first element <= threshold.
std::optional<Eigen::Index> first_crossing_index(std::span<const double> path, double threshold);

struct CrossingQuery {
  int variable = 0;
  double threshold = 0.0;
  double offset = 0.0;            // added to the path before comparing (seasonal add-back)
  std::optional<int> month;       // only test this calendar month
};

struct CrossingResult {
  std::vector<std::optional<Eigen::Index>> first_index;  // per draw, horizon index (0 = first_date)
  double share_never = 0.0;
  std::vector<double> probs;
  std::vector<double> quantile_index;  // +inf where the quantile falls on never-crossing draws

  /// Date for quantile k, or empty when it is +inf.
  [[nodiscard]] std::optional<YearMonth> quantile_date(std::size_t k, YearMonth first_date) const;
};

/// First month each draw satisfies value + offset <= threshold. Draws that
/// never cross rank last (as +inf) in the quantiles.
CrossingResult first_crossing(const ScenarioResult& result, const CrossingQuery& query,
                              std::vector<double> probs = {0.05, 0.5, 0.95});

/// Scenario table "date,value" with YYYY-MM (monthly) or YYYY (annual) dates.
/// Returned points are (month serial, value); annual values sit at July.
std::vector<std::pair<double, double>> load_scenario(std::istream& in);

/// Linear interpolation of scenario points onto `horizon` consecutive months
/// starting at `first`; flat extrapolation outside the table.
Eigen::VectorXd scenario_targets(std::span<const std::pair<double, double>> points, YearMonth first, int horizon);

}  // namespace svarkit::scenario
