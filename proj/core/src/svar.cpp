#include "svarkit/svar.hpp"

#include "svarkit/error.hpp"

#include <algorithm>
#include <numeric>

namespace svarkit::svar {

Eigen::MatrixXd cholesky_identify(const Eigen::MatrixXd& sigma_u) {
  if (sigma_u.rows() != sigma_u.cols() || sigma_u.size() == 0) throw DataError("residual covariance must be square");
  if (!sigma_u.isApprox(sigma_u.transpose(), 1e-10)) throw NumericalError("residual covariance is not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(sigma_u);
  if (llt.info() != Eigen::Success || !(llt.matrixLLT().diagonal().minCoeff() > 0.0)) {
    const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sigma_u).eigenvalues().minCoeff();
    throw NumericalError("residual covariance is not positive definite (smallest eigenvalue " +
                         std::to_string(min_eig) + ")");
  }
  return llt.matrixL();
}

StructuralModel identify(const bvar::VarCoefficients& coeffs, const Eigen::MatrixXd& sigma_u,
                         std::vector<int> ordering) {
  if (ordering.empty()) {
    ordering.resize(static_cast<std::size_t>(sigma_u.rows()));
    std::iota(ordering.begin(), ordering.end(), 0);
  }
  return StructuralModel{coeffs, cholesky_identify(sigma_u), std::move(ordering)};
}

Eigen::MatrixXd residuals(const bvar::VarCoefficients& coeffs, const Eigen::MatrixXd& data) {
  const auto design = bvar::build_design(data, coeffs.n_lags(), coeffs.has_trend());
  return design.y - design.x * bvar::coefficient_matrix(coeffs);
}

Eigen::MatrixXd recover_shocks(const StructuralModel& model, const Eigen::MatrixXd& residuals) {
  if (residuals.cols() != model.impact.rows()) throw DataError("residual width does not match the model");
  // Solve C eps_t = u_t for all t at once: eps' = C^-1 u'.
  return model.impact.triangularView<Eigen::Lower>().solve(residuals.transpose()).transpose();
}

TimeSeriesPanel apply_ordering(const TimeSeriesPanel& panel, std::span<const int> permutation) {
  const auto M = panel.cols();
  std::vector<int> sorted(permutation.begin(), permutation.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> expected(static_cast<std::size_t>(M));
  std::iota(expected.begin(), expected.end(), 0);
  if (sorted != expected) throw DataError("ordering is not a permutation of the panel's variables");

  Eigen::MatrixXd values(panel.rows(), M);
  std::vector<VariableSpec> vars;
  vars.reserve(static_cast<std::size_t>(M));
  for (Eigen::Index k = 0; k < M; ++k) {
    const auto src = permutation[static_cast<std::size_t>(k)];
    values.col(k) = panel.values().col(src);
    auto v = panel.variables()[static_cast<std::size_t>(src)];
    v.ordering_index = static_cast<int>(k);
    vars.push_back(std::move(v));
  }
  return TimeSeriesPanel(panel.start(), std::move(values), std::move(vars));
}

TimeSeriesPanel apply_ordering(const TimeSeriesPanel& panel, std::span<const std::string> names) {
  if (static_cast<Eigen::Index>(names.size()) != panel.cols()) {
    throw DataError("ordering must list every panel variable exactly once");
  }
  std::vector<int> perm;
  perm.reserve(names.size());
  for (const auto& n : names) perm.push_back(static_cast<int>(panel.column(n)));
  return apply_ordering(panel, std::span<const int>(perm));
}

}  // namespace svarkit::svar
