#pragma once

#include "svarkit/bvar.hpp"
#include "svarkit/panel.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace svarkit::svar {

/// Reduced-form coefficients plus the recursive impact matrix C, u_t = C eps_t.
struct StructuralModel {
  bvar::VarCoefficients coeffs;
  Eigen::MatrixXd impact;      // lower triangular, positive diagonal, C C' = Sigma_u
  std::vector<int> ordering;   // column permutation the model was identified under
};

/// Lower-triangular C with C C' = sigma_u and positive diagonal. Throws
/// NumericalError (quoting the smallest eigenvalue) for non-PD input.
Eigen::MatrixXd cholesky_identify(const Eigen::MatrixXd& sigma_u);

StructuralModel identify(const bvar::VarCoefficients& coeffs, const Eigen::MatrixXd& sigma_u,
                         std::vector<int> ordering = {});

/// Reduced-form residuals u_t of `data` (rows are time) for t = P..T-1.
Eigen::MatrixXd residuals(const bvar::VarCoefficients& coeffs, const Eigen::MatrixXd& data);

/// eps_t = C^-1 u_t by forward substitution; rows are time.
Eigen::MatrixXd recover_shocks(const StructuralModel& model, const Eigen::MatrixXd& residuals);

/// New column k is old column permutation[k]; ordering indices are rewritten.
/// Throws DataError unless `permutation` is a permutation of 0..M-1.
TimeSeriesPanel apply_ordering(const TimeSeriesPanel& panel, std::span<const int> permutation);

/// Same, with the new ordering given by variable names.
TimeSeriesPanel apply_ordering(const TimeSeriesPanel& panel, std::span<const std::string> names);

}  // namespace svarkit::svar
