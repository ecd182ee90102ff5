#pragma once

#include "svarkit/calendar.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

/// Harvey basic structural model: y = trend + seasonal + irregular, with a
/// random-walk trend whose drift is itself a random walk and a dummy-form
/// stochastic seasonal.
namespace svarkit::bsm {

struct BsmSpec {
  int seasonal_period = 12;
  double irregular_var = 0.0;  // observation noise eta
  double level_var = 0.0;      // trend disturbance u
  double slope_var = 0.0;      // drift disturbance v
  double seasonal_var = 0.0;   // seasonal disturbance w

  /// Throws DataError unless period >= 2, all variances >= 0, one > 0.
  void validate() const;
};

/// Time-invariant linear Gaussian state space:
///   y_t = Z a_t + eps_t,        eps_t ~ N(0, H)
///   a_{t+1} = T a_t + zeta_t,   zeta_t ~ N(0, Q)
/// State layout: [trend, drift, gamma_t, gamma_{t-1}, ..., gamma_{t-s+2}].
struct StateSpace {
  Eigen::MatrixXd transition;
  Eigen::RowVectorXd observation;
  Eigen::MatrixXd state_cov;
  double observation_var = 0.0;

  [[nodiscard]] Eigen::Index state_dim() const { return transition.rows(); }
};

StateSpace build_state_space(const BsmSpec& spec);

struct FilterOptions {
  /// Initial state variance = diffuse_scale * sample variance of the series.
  double diffuse_scale = 1e7;
};

struct FilterResult {
  std::vector<Eigen::VectorXd> predicted_mean;  // a_t given y_1..y_{t-1}
  std::vector<Eigen::MatrixXd> predicted_cov;
  std::vector<Eigen::VectorXd> filtered_mean;   // a_t given y_1..y_t
  std::vector<Eigen::MatrixXd> filtered_cov;
  std::vector<Eigen::VectorXd> gain;            // K_t = T P_t Z' / F_t
  Eigen::VectorXd innovation;
  Eigen::VectorXd innovation_var;
  double loglik = 0.0;
};

/// Kalman filter with approximate diffuse initialization. The log-likelihood
/// is the full prediction-error decomposition over all T observations.
/// Throws NumericalError on a non-positive or non-finite innovation variance.
FilterResult kalman_filter(const StateSpace& system, std::span<const double> series, const FilterOptions& options = {});

struct BsmComponents {
  Eigen::VectorXd trend;
  Eigen::VectorXd drift;
  Eigen::VectorXd seasonal;
  Eigen::VectorXd noise;  // y - trend - seasonal
  double loglik = 0.0;
  std::vector<Eigen::MatrixXd> state_cov;  // smoothed, symmetric PSD
};

/// Fixed-interval smoother (backward r/N recursions, no covariance inverses).
BsmComponents kalman_smoother(const StateSpace& system, std::span<const double> series,
                              const FilterOptions& options = {});

struct EstimateOptions {
  int seasonal_period = 12;
  int max_iterations = 1000;
  double tolerance = 1e-8;  // on |delta loglik|
  FilterOptions filter;
};

struct BsmFit {
  BsmSpec spec;
  BsmComponents components;
  int iterations = 0;
};

/// Maximum likelihood over log-variances (quasi-Newton, numerical gradient).
/// Variances are bounded below by 1e-12 times the series variance.
BsmFit estimate_bsm(std::span<const double> series, const EstimateOptions& options = {});

/// Log-likelihood of `series` under `spec`.
double log_likelihood(const BsmSpec& spec, std::span<const double> series, const FilterOptions& options = {});

enum class SyntheticMode { static_mean, evolving };

struct AnnualSeries {
  int first_year = 0;
  std::vector<double> values;
};

/// One value per year at calendar `month`: trend plus the month's mean
/// seasonal (static) or the year-specific smoothed seasonal (evolving).
/// `start` is the date of the first observation. Throws DataError for a
/// month outside 1..12.
AnnualSeries synthetic_month(const BsmComponents& components, YearMonth start, int month, SyntheticMode mode);

/// Monthly series trend_t + seasonal at `month` of year(t) (evolving synthetic
/// month on the monthly grid). Years where `month` is not observed borrow the
/// nearest observed year.
Eigen::VectorXd evolving_adjusted_trend(const BsmComponents& components, YearMonth start, int month);

/// Mean smoothed seasonal per calendar month (12 values, index month-1).
Eigen::VectorXd mean_seasonal_by_month(const BsmComponents& components, YearMonth start);

}  // namespace svarkit::bsm
