#pragma once

#include "svarkit/bvar.hpp"
#include "svarkit/stats.hpp"
#include "svarkit/svar.hpp"

#include <Eigen/Dense>

#include <vector>

namespace svarkit::irf {

/// VAR(P) stacked as a VAR(1) in M*P states:
///   [Phi_1 ... Phi_P]
///   [ I   0 ...   0 ]
///   [ 0   I ...   0 ] ...
struct CompanionForm {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd intercept;  // c in the first M entries, zeros below
  Eigen::Index n_vars = 0;
  int n_lags = 0;

  /// M x MP matrix picking the current-period block out of the state.
  [[nodiscard]] Eigen::MatrixXd selector() const;
  [[nodiscard]] double spectral_radius() const;
};

CompanionForm companion(const bvar::VarCoefficients& coeffs);

/// Responses of all variables over h = 0..horizon to a structural shock of
/// `shock_scale` standard deviations in variable `shock`. Row h holds the
/// response at horizon h. Iterates the lag recursion; never forms powers of
/// the companion matrix.
Eigen::MatrixXd impulse_response(const bvar::VarCoefficients& coeffs, const Eigen::MatrixXd& impact, int shock,
                                 int horizon, double shock_scale = 1.0);
Eigen::MatrixXd impulse_response(const svar::StructuralModel& model, int shock, int horizon, double shock_scale = 1.0);

/// Running sums along the horizon (rows).
Eigen::MatrixXd cumulative(const Eigen::MatrixXd& responses);

inline const std::vector<double> kDefaultProbs{0.05, 0.5, 0.95};

struct IrfResult {
  int shock = 0;
  Eigen::MatrixXd impact;                  // common C (fixed Sigma_u)
  std::vector<Eigen::MatrixXd> responses;  // per draw, (H+1) x M
  std::vector<Eigen::MatrixXd> cumulative; // per draw running sums
  stats::Bands bands;
  stats::Bands cumulative_bands;
};

/// Per-draw IRFs with a common impact matrix from the fixed Sigma_u, summarized
/// by pointwise quantiles (type-7 interpolation) and means.
IrfResult irf_bands(const bvar::CoefficientDraws& draws, const Eigen::MatrixXd& sigma_u, int shock, int horizon,
                    std::vector<double> probs = kDefaultProbs);

}  // namespace svarkit::irf
