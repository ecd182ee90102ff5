#pragma once

#include "svarkit/bvar.hpp"
#include "svarkit/stats.hpp"
#include "svarkit/svar.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

/// Transmission-mechanism analysis: impulse responses with selected channels
/// held at zero response by offsetting artificial structural shocks.
namespace svarkit::tma {

struct ShockSchedule {
  int source_shock = 0;
  std::vector<int> shut_set;
  Eigen::MatrixXd artificial;  // (H+1) x |Z|, column k is the shock to shut_set[k]
};

struct ShutdownResult {
  Eigen::MatrixXd baseline;        // (H+1) x M
  Eigen::MatrixXd counterfactual;  // (H+1) x M, zero in every shut column
  ShockSchedule schedule;
};

/// At each horizon the artificial shocks solve C[Z,Z] e = -r_h[Z], where
/// r_h is the response before the horizon-h artificial shocks. C[Z,Z] is a
/// principal block of a lower-triangular matrix, so the solve is triangular.
/// Throws DataError if `shock` is in the shut set or indices are invalid, and
/// NumericalError if C[Z,Z] is singular.
ShutdownResult shutdown_irf(const bvar::VarCoefficients& coeffs, const Eigen::MatrixXd& impact, int shock,
                            std::span<const int> shut_set, int horizon);
ShutdownResult shutdown_irf(const svar::StructuralModel& model, int shock, std::span<const int> shut_set,
                            int horizon);

/// (baseline - counterfactual) / baseline; empty when |baseline| < eps.
std::optional<double> amplification_share(double baseline, double counterfactual, double eps = 1e-12);

struct ShutdownBands {
  std::vector<ShutdownResult> per_draw;
  stats::Bands baseline;
  stats::Bands counterfactual;
  stats::Bands cumulative_baseline;
  stats::Bands cumulative_counterfactual;
};

/// Shutdown IRFs for every posterior draw with the common impact matrix.
ShutdownBands shutdown_bands(const bvar::CoefficientDraws& draws, const Eigen::MatrixXd& sigma_u, int shock,
                             std::span<const int> shut_set, int horizon,
                             std::vector<double> probs = {0.05, 0.5, 0.95});

}  // namespace svarkit::tma
