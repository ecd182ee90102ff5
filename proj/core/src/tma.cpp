#include "svarkit/tma.hpp"

#include "svarkit/error.hpp"
#include "svarkit/irf.hpp"

#include <algorithm>
#include <cmath>

namespace svarkit::tma {

ShutdownResult shutdown_irf(const bvar::VarCoefficients& coeffs, const Eigen::MatrixXd& impact, int shock,
                            std::span<const int> shut_set, int horizon) {
  const auto M = coeffs.n_vars();
  if (horizon < 0) throw DataError("horizon must be non-negative");
  if (shock < 0 || shock >= M) throw DataError("shock index out of range");
  std::vector<int> shut(shut_set.begin(), shut_set.end());
  std::sort(shut.begin(), shut.end());
  if (std::adjacent_find(shut.begin(), shut.end()) != shut.end()) throw DataError("shut set has duplicates");
  for (int z : shut) {
    if (z < 0 || z >= M) throw DataError("shut variable index out of range");
    if (z == shock) throw DataError("the shocked variable cannot be in the shut set");
  }

  const auto nz = static_cast<Eigen::Index>(shut.size());
  Eigen::MatrixXd c_zz(nz, nz);
  Eigen::MatrixXd c_z(M, nz);  // columns of C for the shut shocks
  for (Eigen::Index a = 0; a < nz; ++a) {
    c_z.col(a) = impact.col(shut[static_cast<std::size_t>(a)]);
    for (Eigen::Index b = 0; b < nz; ++b) {
      c_zz(a, b) = impact(shut[static_cast<std::size_t>(a)], shut[static_cast<std::size_t>(b)]);
    }
  }
  if (nz > 0 && (c_zz.diagonal().array().abs() < 1e-300).any()) {
    throw NumericalError("restricted impact sub-matrix is singular");
  }

  ShutdownResult out;
  out.baseline = irf::impulse_response(coeffs, impact, shock, horizon);
  out.schedule.source_shock = shock;
  out.schedule.shut_set = shut;
  out.schedule.artificial = Eigen::MatrixXd::Zero(horizon + 1, nz);
  out.counterfactual = Eigen::MatrixXd::Zero(horizon + 1, M);

  const int P = coeffs.n_lags();
  for (int h = 0; h <= horizon; ++h) {
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(M);
    if (h == 0) r = impact.col(shock).transpose();
    for (int p = 1; p <= std::min(h, P); ++p) {
      r.noalias() += out.counterfactual.row(h - p) * coeffs.lags[static_cast<std::size_t>(p - 1)].transpose();
    }
    if (nz > 0) {
      Eigen::VectorXd target(nz);
      for (Eigen::Index a = 0; a < nz; ++a) target(a) = -r(shut[static_cast<std::size_t>(a)]);
      const Eigen::VectorXd e = c_zz.triangularView<Eigen::Lower>().solve(target);
      out.schedule.artificial.row(h) = e.transpose();
      r += (c_z * e).transpose();
    }
    out.counterfactual.row(h) = r;
  }
  return out;
}

ShutdownResult shutdown_irf(const svar::StructuralModel& model, int shock, std::span<const int> shut_set,
                            int horizon) {
  return shutdown_irf(model.coeffs, model.impact, shock, shut_set, horizon);
}

std::optional<double> amplification_share(double baseline, double counterfactual, double eps) {
  if (!(std::abs(baseline) >= eps)) return std::nullopt;
  return (baseline - counterfactual) / baseline;
}

ShutdownBands shutdown_bands(const bvar::CoefficientDraws& draws, const Eigen::MatrixXd& sigma_u, int shock,
                             std::span<const int> shut_set, int horizon, std::vector<double> probs) {
  if (draws.size() == 0) throw DataError("no posterior draws");
  const Eigen::MatrixXd impact = svar::cholesky_identify(sigma_u);
  ShutdownBands out;
  out.per_draw.reserve(draws.size());
  std::vector<Eigen::MatrixXd> base, cf, cbase, ccf;
  for (const auto& d : draws.draws) {
    out.per_draw.push_back(shutdown_irf(d, impact, shock, shut_set, horizon));
    base.push_back(out.per_draw.back().baseline);
    cf.push_back(out.per_draw.back().counterfactual);
    cbase.push_back(irf::cumulative(base.back()));
    ccf.push_back(irf::cumulative(cf.back()));
  }
  out.baseline = stats::summarize(base, probs);
  out.counterfactual = stats::summarize(cf, probs);
  out.cumulative_baseline = stats::summarize(cbase, probs);
  out.cumulative_counterfactual = stats::summarize(ccf, std::move(probs));
  return out;
}

}  // namespace svarkit::tma
