#pragma once

#include "svarkit/panel.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace svarkit::bvar {

/// Reduced-form VAR(P): y_t = c + sum_p Phi_p y_{t-p} [+ d * t] + u_t.
struct VarCoefficients {
  Eigen::VectorXd intercept;
  std::vector<Eigen::MatrixXd> lags;  // Phi_1..Phi_P, each M x M
  Eigen::VectorXd trend;              // empty when the model has no trend

  [[nodiscard]] Eigen::Index n_vars() const { return intercept.size(); }
  [[nodiscard]] int n_lags() const { return static_cast<int>(lags.size()); }
  [[nodiscard]] bool has_trend() const { return trend.size() > 0; }
};

/// Regressors per equation: M*P lags, the constant, optionally a trend.
[[nodiscard]] constexpr Eigen::Index regressor_count(Eigen::Index m, int lags, bool trend) {
  return m * lags + 1 + (trend ? 1 : 0);
}

/// Length of the stacked coefficient vector, M * (M*P + 1 [+1]).
[[nodiscard]] constexpr Eigen::Index coefficient_count(Eigen::Index m, int lags, bool trend = false) {
  return m * regressor_count(m, lags, trend);
}

/// Stacked regression Y = X B + U on T-P effective observations. Row k of X
/// is [y_{t-1}' ... y_{t-P}' 1 (t)] for t = P + k, where t is the 0-based row
/// of the data matrix (also the trend regressor's value).
struct Design {
  Eigen::MatrixXd y;
  Eigen::MatrixXd x;
  int lags = 1;
  bool trend = false;

  [[nodiscard]] Eigen::Index n_vars() const { return y.cols(); }
  [[nodiscard]] Eigen::Index n_obs() const { return y.rows(); }
};

Design build_design(const Eigen::MatrixXd& data, int lags, bool trend = false);

/// beta = vec(B), B = [Phi_1 ... Phi_P c (d)]' ; equation-major stacking.
Eigen::VectorXd pack(const VarCoefficients& coeffs);
VarCoefficients unpack(const Eigen::VectorXd& beta, Eigen::Index n_vars, int lags, bool trend);
Eigen::MatrixXd coefficient_matrix(const VarCoefficients& coeffs);  // B, (MP+1[+1]) x M

struct MinnesotaHyper {
  double b_ar = 0.9;     // prior mean of the first own lag
  double lambda1 = 0.3;  // overall tightness
  double lambda2 = 0.5;  // cross-variable tightness
  double lambda3 = 1.5;  // lag decay
  double lambda4 = 100;  // constant / exogenous tightness
  int lags = 12;
  bool trend = false;

  void validate() const;
};

/// OLS residual covariance of the VAR(P) with divisor T - P. Jitter is added
/// on the diagonal if the estimate is not numerically positive definite.
/// Throws DataError when the design is too short or rank deficient.
Eigen::MatrixXd estimate_sigma(const Eigen::MatrixXd& data, int lags, bool trend = false);
Eigen::MatrixXd estimate_sigma(const TimeSeriesPanel& panel, int lags, bool trend = false);

/// Residual standard deviations of univariate AR(P) fits (with constant).
Eigen::VectorXd ar_scales(const Eigen::MatrixXd& data, int lags);

/// Independent Gaussian prior: mean and variance per element of beta.
struct MinnesotaPrior {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
};

/// Prior std of lag p of variable j in equation i:
///   lambda1 / p^lambda3                      (i == j)
///   lambda1 * lambda2 / p^lambda3 * s_i/s_j  (i != j)
/// Constant (and trend) std lambda1 * lambda4 * s_i. Mean b_ar on own first
/// lag, zero elsewhere.
MinnesotaPrior build_minnesota_prior(const MinnesotaHyper& hyper, const Eigen::VectorXd& scales);
MinnesotaPrior build_minnesota_prior(const MinnesotaHyper& hyper, const TimeSeriesPanel& panel);

struct BvarPosterior {
  Eigen::VectorXd beta_mean;
  Eigen::MatrixXd beta_cov;
  Eigen::MatrixXd sigma_u;
  MinnesotaHyper hyper;
  Eigen::MatrixXd xtx;  // X'X
  Eigen::MatrixXd xty;  // X'Y
  Eigen::Index n_obs = 0;
  double log_marginal = 0.0;

  [[nodiscard]] Eigen::Index n_vars() const { return sigma_u.rows(); }
  [[nodiscard]] VarCoefficients mean_coefficients() const;
};

/// Closed-form Gaussian posterior of beta with Sigma_u known, plus the log
/// marginal likelihood of the data under the prior.
BvarPosterior posterior(const MinnesotaPrior& prior, const Design& design, const Eigen::MatrixXd& sigma_u,
                        const MinnesotaHyper& hyper);

/// Estimates Sigma_u, builds the prior and the posterior in one go.
BvarPosterior fit(const Eigen::MatrixXd& data, const MinnesotaHyper& hyper);

struct CoefficientDraws {
  std::vector<VarCoefficients> draws;
  std::vector<double> spectral_radius;  // companion spectral radius per draw
  std::uint64_t seed = 0;

  [[nodiscard]] std::size_t size() const { return draws.size(); }
  [[nodiscard]] bool stable(std::size_t i) const { return spectral_radius[i] < 1.0; }
};

/// N independent posterior draws; draw i uses stream (seed, i).
/// Explosive draws are kept and only flagged.
CoefficientDraws draw_posterior(const BvarPosterior& post, int n, std::uint64_t seed);

/// A single "draw" at the given coefficients (no sampling).
CoefficientDraws point_draws(const VarCoefficients& coeffs);

struct GridPoint {
  MinnesotaHyper hyper;
  double log_marginal = 0.0;  // NaN when estimation failed at this point
};

struct GridSearchResult {
  MinnesotaHyper best;
  std::vector<GridPoint> table;
};

/// Evaluates every hyperparameter set and returns the marginal-likelihood
/// maximizer. Throws NumericalError when no point could be estimated.
GridSearchResult grid_search_hyper(std::span<const MinnesotaHyper> grid, const Eigen::MatrixXd& data);

/// Cartesian product of the listed values.
std::vector<MinnesotaHyper> make_grid(std::span<const double> b_ar, std::span<const double> lambda1,
                                      std::span<const double> lambda2, std::span<const double> lambda3,
                                      std::span<const double> lambda4, int lags, bool trend = false);

/// Gaussian log-likelihood of the design under the given coefficients.
double log_likelihood(const VarCoefficients& coeffs, const Design& design, const Eigen::MatrixXd& sigma_u);

/// DIC = mean deviance + p_D, with p_D = mean deviance - deviance at the mean
/// of the draws. Lower is better.
double dic(const CoefficientDraws& draws, const Design& design, const Eigen::MatrixXd& sigma_u);

}  // namespace svarkit::bvar
