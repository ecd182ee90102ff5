#include "svarkit/bvar.hpp"

#include "svarkit/error.hpp"
#include "svarkit/irf.hpp"
#include "svarkit/rng.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <utility>

namespace svarkit::bvar {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

Eigen::LLT<Eigen::MatrixXd> checked_llt(const Eigen::MatrixXd& m, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw NumericalError(std::string(what) + " is not positive definite");
  return llt;
}

double log_det(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace

Design build_design(const Eigen::MatrixXd& data, int lags, bool trend) {
  if (lags < 1) throw DataError("lag order must be at least 1");
  const auto T = data.rows();
  const auto M = data.cols();
  if (T <= lags) throw DataError("sample shorter than the lag order");
  const auto K = regressor_count(M, lags, trend);
  Design d;
  d.lags = lags;
  d.trend = trend;
  d.y = data.bottomRows(T - lags);
  d.x.resize(T - lags, K);
  for (Eigen::Index t = lags; t < T; ++t) {
    const auto k = t - lags;
    for (int p = 1; p <= lags; ++p) d.x.row(k).segment((p - 1) * M, M) = data.row(t - p);
    d.x(k, M * lags) = 1.0;
    if (trend) d.x(k, M * lags + 1) = static_cast<double>(t);
  }
  return d;
}

Eigen::MatrixXd coefficient_matrix(const VarCoefficients& coeffs) {
  const auto M = coeffs.n_vars();
  const int P = coeffs.n_lags();
  Eigen::MatrixXd B(regressor_count(M, P, coeffs.has_trend()), M);
  for (int p = 0; p < P; ++p) B.middleRows(p * M, M) = coeffs.lags[static_cast<std::size_t>(p)].transpose();
  B.row(M * P) = coeffs.intercept.transpose();
  if (coeffs.has_trend()) B.row(M * P + 1) = coeffs.trend.transpose();
  return B;
}

Eigen::VectorXd pack(const VarCoefficients& coeffs) {
  const Eigen::MatrixXd B = coefficient_matrix(coeffs);
  return Eigen::Map<const Eigen::VectorXd>(B.data(), B.size());
}

VarCoefficients unpack(const Eigen::VectorXd& beta, Eigen::Index n_vars, int lags, bool trend) {
  const auto K = regressor_count(n_vars, lags, trend);
  if (beta.size() != K * n_vars) throw Error("coefficient vector has the wrong length");
  const Eigen::Map<const Eigen::MatrixXd> B(beta.data(), K, n_vars);
  VarCoefficients c;
  c.lags.reserve(static_cast<std::size_t>(lags));
  for (int p = 0; p < lags; ++p) c.lags.emplace_back(B.middleRows(p * n_vars, n_vars).transpose());
  c.intercept = B.row(n_vars * lags).transpose();
  if (trend) c.trend = B.row(n_vars * lags + 1).transpose();
  return c;
}

void MinnesotaHyper::validate() const {
  if (!(lambda1 > 0 && lambda2 > 0 && lambda3 > 0 && lambda4 > 0)) {
    throw DataError("Minnesota tightness parameters must be positive");
  }
  if (lags < 1) throw DataError("lag order must be at least 1");
  if (!std::isfinite(b_ar)) throw DataError("b_AR must be finite");
}

Eigen::MatrixXd estimate_sigma(const Eigen::MatrixXd& data, int lags, bool trend) {
  const auto d = build_design(data, lags, trend);
  if (d.n_obs() <= d.x.cols()) {
    throw DataError("too few observations for an OLS VAR(" + std::to_string(lags) + ") fit");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d.x);
  if (qr.rank() < d.x.cols()) throw DataError("rank-deficient VAR design matrix");
  const Eigen::MatrixXd resid = d.y - d.x * qr.solve(d.y);
  Eigen::MatrixXd sigma = resid.transpose() * resid / static_cast<double>(d.n_obs());
  sigma = 0.5 * (sigma + sigma.transpose()).eval();

  const double base = std::max(sigma.diagonal().mean(), 0.0);
  double jitter = base > 0.0 ? 1e-12 * base : 1e-12;
  for (int attempt = 0; attempt < 40; ++attempt) {
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() == Eigen::Success && llt.matrixLLT().diagonal().minCoeff() > 0.0) return sigma;
    sigma.diagonal().array() += jitter;
    jitter *= 10.0;
  }
  throw NumericalError("residual covariance could not be made positive definite");
}

Eigen::MatrixXd estimate_sigma(const TimeSeriesPanel& panel, int lags, bool trend) {
  return estimate_sigma(panel.values(), lags, trend);
}

Eigen::VectorXd ar_scales(const Eigen::MatrixXd& data, int lags) {
  Eigen::VectorXd scales(data.cols());
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    const auto d = build_design(data.col(j), lags, false);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d.x);
    const Eigen::VectorXd resid = d.y - d.x * qr.solve(d.y);
    scales(j) = std::sqrt(resid.squaredNorm() / static_cast<double>(d.n_obs()));
  }
  return scales;
}

MinnesotaPrior build_minnesota_prior(const MinnesotaHyper& hyper, const Eigen::VectorXd& scales) {
  hyper.validate();
  const auto M = scales.size();
  for (Eigen::Index j = 0; j < M; ++j) {
    if (!(scales(j) > 0.0) || !std::isfinite(scales(j))) {
      throw DataError("Minnesota scale of variable " + std::to_string(j) + " is zero or invalid");
    }
  }
  const int P = hyper.lags;
  const auto K = regressor_count(M, P, hyper.trend);
  MinnesotaPrior prior{Eigen::VectorXd::Zero(M * K), Eigen::VectorXd::Zero(M * K)};
  for (Eigen::Index i = 0; i < M; ++i) {
    for (int p = 1; p <= P; ++p) {
      const double decay = hyper.lambda1 / std::pow(static_cast<double>(p), hyper.lambda3);
      for (Eigen::Index j = 0; j < M; ++j) {
        const auto idx = i * K + (p - 1) * M + j;
        const double sd = i == j ? decay : decay * hyper.lambda2 * scales(i) / scales(j);
        prior.variance(idx) = sd * sd;
        if (i == j && p == 1) prior.mean(idx) = hyper.b_ar;
      }
    }
    const double det_sd = hyper.lambda1 * hyper.lambda4 * scales(i);
    prior.variance(i * K + M * P) = det_sd * det_sd;
    if (hyper.trend) prior.variance(i * K + M * P + 1) = det_sd * det_sd;
  }
  return prior;
}

MinnesotaPrior build_minnesota_prior(const MinnesotaHyper& hyper, const TimeSeriesPanel& panel) {
  return build_minnesota_prior(hyper, ar_scales(panel.values(), hyper.lags));
}

VarCoefficients BvarPosterior::mean_coefficients() const {
  return unpack(beta_mean, n_vars(), hyper.lags, hyper.trend);
}

BvarPosterior posterior(const MinnesotaPrior& prior, const Design& design, const Eigen::MatrixXd& sigma_u,
                        const MinnesotaHyper& hyper) {
  const auto M = design.n_vars();
  const auto K = design.x.cols();
  const auto dim = M * K;
  if (sigma_u.rows() != M || sigma_u.cols() != M || prior.mean.size() != dim || prior.variance.size() != dim ||
      design.lags != hyper.lags || design.trend != hyper.trend) {
    throw Error("prior, design and residual covariance are not conformable");
  }

  const auto sigma_llt = checked_llt(sigma_u, "residual covariance");
  const Eigen::MatrixXd sigma_inv = sigma_llt.solve(Eigen::MatrixXd::Identity(M, M));

  BvarPosterior post;
  post.sigma_u = sigma_u;
  post.hyper = hyper;
  post.n_obs = design.n_obs();
  post.xtx = design.x.transpose() * design.x;
  post.xty = design.x.transpose() * design.y;

  // Precision = V0^-1 + Sigma^-1 (x) X'X ; rhs = V0^-1 beta0 + vec(X'Y Sigma^-1).
  Eigen::MatrixXd precision(dim, dim);
  for (Eigen::Index i = 0; i < M; ++i) {
    for (Eigen::Index l = 0; l < M; ++l) precision.block(i * K, l * K, K, K) = sigma_inv(i, l) * post.xtx;
  }
  precision.diagonal() += prior.variance.cwiseInverse();
  const Eigen::MatrixXd xty_sinv = post.xty * sigma_inv;
  const Eigen::VectorXd rhs =
      prior.mean.cwiseQuotient(prior.variance) + Eigen::Map<const Eigen::VectorXd>(xty_sinv.data(), dim);

  const auto prec_llt = checked_llt(precision, "posterior precision");
  post.beta_mean = prec_llt.solve(rhs);
  post.beta_cov = prec_llt.solve(Eigen::MatrixXd::Identity(dim, dim));
  post.beta_cov = 0.5 * (post.beta_cov + post.beta_cov.transpose()).eval();

  const Eigen::Map<const Eigen::MatrixXd> B(post.beta_mean.data(), K, M);
  const Eigen::MatrixXd resid = design.y - design.x * B;
  const double fit_term = (sigma_inv * (resid.transpose() * resid)).trace();
  const double prior_term = (post.beta_mean - prior.mean).array().square().cwiseQuotient(prior.variance.array()).sum();
  const double n = static_cast<double>(design.n_obs() * M);
  post.log_marginal = -0.5 * n * kLog2Pi - 0.5 * static_cast<double>(design.n_obs()) * log_det(sigma_llt) -
                      0.5 * prior.variance.array().log().sum() - 0.5 * log_det(prec_llt) -
                      0.5 * (fit_term + prior_term);
  if (!std::isfinite(post.log_marginal)) throw NumericalError("log marginal likelihood is not finite");
  return post;
}

BvarPosterior fit(const Eigen::MatrixXd& data, const MinnesotaHyper& hyper) {
  hyper.validate();
  const auto sigma = estimate_sigma(data, hyper.lags, hyper.trend);
  const auto prior = build_minnesota_prior(hyper, ar_scales(data, hyper.lags));
  return posterior(prior, build_design(data, hyper.lags, hyper.trend), sigma, hyper);
}

CoefficientDraws draw_posterior(const BvarPosterior& post, int n, std::uint64_t seed) {
  if (n < 1) throw DataError("number of draws must be at least 1");
  Eigen::LLT<Eigen::MatrixXd> llt(post.beta_cov);
  if (llt.info() != Eigen::Success) throw NumericalError("posterior covariance is not positive definite");
  const Eigen::MatrixXd L = llt.matrixL();

  CoefficientDraws out;
  out.seed = seed;
  out.draws.reserve(static_cast<std::size_t>(n));
  out.spectral_radius.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto gen = make_stream(seed, static_cast<std::uint64_t>(i));
    const Eigen::VectorXd beta = post.beta_mean + L * standard_normal(gen, post.beta_mean.size());
    out.draws.push_back(unpack(beta, post.n_vars(), post.hyper.lags, post.hyper.trend));
    out.spectral_radius.push_back(irf::companion(out.draws.back()).spectral_radius());
  }
  return out;
}

CoefficientDraws point_draws(const VarCoefficients& coeffs) {
  CoefficientDraws out;
  out.draws.push_back(coeffs);
  out.spectral_radius.push_back(irf::companion(coeffs).spectral_radius());
  return out;
}

std::vector<MinnesotaHyper> make_grid(std::span<const double> b_ar, std::span<const double> lambda1,
                                      std::span<const double> lambda2, std::span<const double> lambda3,
                                      std::span<const double> lambda4, int lags, bool trend) {
  std::vector<MinnesotaHyper> grid;
  for (double b : b_ar)
    for (double l1 : lambda1)
      for (double l2 : lambda2)
        for (double l3 : lambda3)
          for (double l4 : lambda4) grid.push_back(MinnesotaHyper{b, l1, l2, l3, l4, lags, trend});
  return grid;
}

GridSearchResult grid_search_hyper(std::span<const MinnesotaHyper> grid, const Eigen::MatrixXd& data) {
  if (grid.empty()) throw DataError("hyperparameter grid is empty");

  struct Shared {
    Eigen::MatrixXd sigma;
    Eigen::VectorXd scales;
    Design design;
  };
  std::map<std::pair<int, bool>, Shared> cache;

  GridSearchResult result;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& hyper : grid) {
    GridPoint point{hyper, std::numeric_limits<double>::quiet_NaN()};
    try {
      hyper.validate();
      const auto key = std::make_pair(hyper.lags, hyper.trend);
      auto it = cache.find(key);
      if (it == cache.end()) {
        Shared s{estimate_sigma(data, hyper.lags, hyper.trend), ar_scales(data, hyper.lags),
                 build_design(data, hyper.lags, hyper.trend)};
        it = cache.emplace(key, std::move(s)).first;
      }
      const auto prior = build_minnesota_prior(hyper, it->second.scales);
      point.log_marginal = posterior(prior, it->second.design, it->second.sigma, hyper).log_marginal;
    } catch (const Error&) {
      // Recorded as NaN in the table.
    }
    if (std::isfinite(point.log_marginal) && point.log_marginal > best) {
      best = point.log_marginal;
      result.best = hyper;
    }
    result.table.push_back(point);
  }
  if (!std::isfinite(best)) throw NumericalError("estimation failed at every grid point");
  return result;
}

double log_likelihood(const VarCoefficients& coeffs, const Design& design, const Eigen::MatrixXd& sigma_u) {
  const auto sigma_llt = checked_llt(sigma_u, "residual covariance");
  const Eigen::MatrixXd resid = design.y - design.x * coefficient_matrix(coeffs);
  const double quad = (sigma_llt.solve(resid.transpose() * resid)).trace();
  const double n_obs = static_cast<double>(design.n_obs());
  return -0.5 * n_obs * static_cast<double>(design.n_vars()) * kLog2Pi - 0.5 * n_obs * log_det(sigma_llt) -
         0.5 * quad;
}

double dic(const CoefficientDraws& draws, const Design& design, const Eigen::MatrixXd& sigma_u) {
  if (draws.size() == 0) throw DataError("DIC needs at least one draw");
  double mean_deviance = 0.0;
  Eigen::VectorXd mean_beta = Eigen::VectorXd::Zero(pack(draws.draws.front()).size());
  for (const auto& d : draws.draws) {
    mean_deviance += -2.0 * log_likelihood(d, design, sigma_u);
    mean_beta += pack(d);
  }
  const double n = static_cast<double>(draws.size());
  mean_deviance /= n;
  mean_beta /= n;
  const auto& first = draws.draws.front();
  const double deviance_at_mean =
      -2.0 * log_likelihood(unpack(mean_beta, first.n_vars(), first.n_lags(), first.has_trend()), design, sigma_u);
  const double p_d = mean_deviance - deviance_at_mean;
  return mean_deviance + p_d;
}

}  // namespace svarkit::bvar
