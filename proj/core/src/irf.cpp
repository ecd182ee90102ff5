#include "svarkit/irf.hpp"

#include "svarkit/error.hpp"
#include "svarkit/stats.hpp"

namespace svarkit::irf {

Eigen::MatrixXd CompanionForm::selector() const {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n_vars, n_vars * n_lags);
  s.leftCols(n_vars).setIdentity();
  return s;
}

double CompanionForm::spectral_radius() const { return stats::spectral_radius(matrix); }

CompanionForm companion(const bvar::VarCoefficients& coeffs) {
  const auto M = coeffs.n_vars();
  const int P = coeffs.n_lags();
  CompanionForm cf;
  cf.n_vars = M;
  cf.n_lags = P;
  cf.matrix = Eigen::MatrixXd::Zero(M * P, M * P);
  for (int p = 0; p < P; ++p) {
    const auto& phi = coeffs.lags[static_cast<std::size_t>(p)];
    if (phi.rows() != M || phi.cols() != M) throw Error("lag matrices are not M x M");
    cf.matrix.block(0, p * M, M, M) = phi;
  }
  if (P > 1) cf.matrix.bottomLeftCorner(M * (P - 1), M * (P - 1)).setIdentity();
  cf.intercept = Eigen::VectorXd::Zero(M * P);
  cf.intercept.head(M) = coeffs.intercept;
  return cf;
}

Eigen::MatrixXd impulse_response(const bvar::VarCoefficients& coeffs, const Eigen::MatrixXd& impact, int shock,
                                 int horizon, double shock_scale) {
  const auto M = coeffs.n_vars();
  if (horizon < 0) throw DataError("IRF horizon must be non-negative");
  if (shock < 0 || shock >= M) throw DataError("shock index out of range");
  if (impact.rows() != M || impact.cols() != M) throw Error("impact matrix is not M x M");
  const int P = coeffs.n_lags();
  Eigen::MatrixXd resp = Eigen::MatrixXd::Zero(horizon + 1, M);
  resp.row(0) = shock_scale * impact.col(shock).transpose();
  for (int h = 1; h <= horizon; ++h) {
    for (int p = 1; p <= std::min(h, P); ++p) {
      resp.row(h).noalias() += resp.row(h - p) * coeffs.lags[static_cast<std::size_t>(p - 1)].transpose();
    }
  }
  return resp;
}

Eigen::MatrixXd impulse_response(const svar::StructuralModel& model, int shock, int horizon, double shock_scale) {
  return impulse_response(model.coeffs, model.impact, shock, horizon, shock_scale);
}

Eigen::MatrixXd cumulative(const Eigen::MatrixXd& responses) {
  Eigen::MatrixXd out = responses;
  for (Eigen::Index h = 1; h < out.rows(); ++h) out.row(h) += out.row(h - 1);
  return out;
}

IrfResult irf_bands(const bvar::CoefficientDraws& draws, const Eigen::MatrixXd& sigma_u, int shock, int horizon,
                    std::vector<double> probs) {
  if (draws.size() == 0) throw DataError("no posterior draws");
  IrfResult out;
  out.shock = shock;
  out.impact = svar::cholesky_identify(sigma_u);
  out.responses.reserve(draws.size());
  out.cumulative.reserve(draws.size());
  for (const auto& d : draws.draws) {
    out.responses.push_back(impulse_response(d, out.impact, shock, horizon));
    out.cumulative.push_back(cumulative(out.responses.back()));
  }
  out.bands = stats::summarize(out.responses, probs);
  out.cumulative_bands = stats::summarize(out.cumulative, std::move(probs));
  return out;
}

}  // namespace svarkit::irf
