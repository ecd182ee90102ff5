#include "svarkit/bsm.hpp"

#include "svarkit/error.hpp"

#include <Eigen/SparseCore>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

namespace svarkit::bsm {

void BsmSpec::validate() const {
  if (seasonal_period < 2) throw DataError("seasonal period must be at least 2");
  const std::array vars{irregular_var, level_var, slope_var, seasonal_var};
  for (double v : vars) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DataError("BSM variances must be finite and non-negative");
  }
  if (std::all_of(vars.begin(), vars.end(), [](double v) { return v == 0.0; })) {
    throw DataError("at least one BSM variance must be positive");
  }
}

StateSpace build_state_space(const BsmSpec& spec) {
  spec.validate();
  const Eigen::Index n = 2 + (spec.seasonal_period - 1);
  StateSpace ss;
  ss.transition = Eigen::MatrixXd::Zero(n, n);
  ss.transition(0, 0) = 1.0;
  ss.transition(0, 1) = 1.0;
  ss.transition(1, 1) = 1.0;
  ss.transition.row(2).tail(n - 2).setConstant(-1.0);
  for (Eigen::Index k = 3; k < n; ++k) ss.transition(k, k - 1) = 1.0;

  ss.observation = Eigen::RowVectorXd::Zero(n);
  ss.observation(0) = 1.0;
  ss.observation(2) = 1.0;

  ss.state_cov = Eigen::MatrixXd::Zero(n, n);
  ss.state_cov(0, 0) = spec.level_var;
  ss.state_cov(1, 1) = spec.slope_var;
  ss.state_cov(2, 2) = spec.seasonal_var;
  ss.observation_var = spec.irregular_var;
  return ss;
}

namespace {

double series_scale(std::span<const double> y) {
  if (y.size() < 2) return 1.0;
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double ss = 0.0;
  for (double v : y) ss += (v - mean) * (v - mean);
  const double var = ss / static_cast<double>(y.size() - 1);
  return var > 0.0 ? var : 1.0;
}

void symmetrize(Eigen::MatrixXd& m) { m = 0.5 * (m + m.transpose()).eval(); }

}  // namespace

namespace {

// Lower-triangular L with L L' = A A' (A is rows x cols, cols >= rows).
Eigen::MatrixXd lower_factor(const Eigen::MatrixXd& a) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a.transpose());
  Eigen::MatrixXd l = qr.matrixQR().topRows(a.rows()).triangularView<Eigen::Upper>().toDenseMatrix().transpose();
  for (Eigen::Index i = 0; i < l.cols(); ++i) {
    if (l(i, i) < 0.0) l.col(i) = -l.col(i);
  }
  return l;
}

}  // namespace

// The first steps run in square-root form (QR array algorithm): carrying S
// with P = S S' keeps the collapse from the large diffuse variance down to the
// model-implied variance accurate even when the disturbance variances are
// tiny. Once the diffuse part is absorbed the cheaper covariance form is exact
// to working precision.
namespace {

// Runs the filter and returns the log-likelihood; per-step quantities are
// stored only when `out` is given.
double run_filter(const StateSpace& system, std::span<const double> series, const FilterOptions& options,
                  FilterResult* out) {
  const auto n = system.state_dim();
  const auto T = static_cast<Eigen::Index>(series.size());
  const Eigen::SparseMatrix<double> Tm = system.transition.sparseView();
  const Eigen::SparseMatrix<double> Tt = Tm.transpose();
  const auto& Z = system.observation;
  if (!system.state_cov.isDiagonal(0.0)) throw Error("state disturbance covariance must be diagonal");

  if (out) {
    out->predicted_mean.reserve(series.size());
    out->predicted_cov.reserve(series.size());
    out->filtered_mean.reserve(series.size());
    out->filtered_cov.reserve(series.size());
    out->gain.reserve(series.size());
    out->innovation.resize(T);
    out->innovation_var.resize(T);
  }

  const Eigen::VectorXd q_diag = system.state_cov.diagonal();
  const Eigen::VectorXd q_sqrt = q_diag.cwiseMax(0.0).cwiseSqrt();
  const double h_sqrt = std::sqrt(std::max(system.observation_var, 0.0));
  const Eigen::Index sqrt_steps = n + 2;

  Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd S = Eigen::MatrixXd::Identity(n, n) * std::sqrt(options.diffuse_scale * series_scale(series));
  Eigen::MatrixXd P, Pf, Sf, TPf;
  Eigen::VectorXd PZ(n), af(n);
  constexpr double log_2pi = 1.8378770664093454836;
  double loglik = 0.0;

  Eigen::MatrixXd pre = Eigen::MatrixXd::Zero(n + 1, n + 1);
  Eigen::MatrixXd pred = Eigen::MatrixXd::Zero(n, 2 * n);
  for (Eigen::Index t = 0; t < T; ++t) {
    const bool square_root = t < sqrt_steps;
    if (t == sqrt_steps) P = S * S.transpose();
    if (out) {
      out->predicted_mean.push_back(a);
      out->predicted_cov.push_back(square_root ? Eigen::MatrixXd(S * S.transpose()) : P);
    }

    double F = 0.0;
    if (square_root) {
      // [sqrt(H) ZS; 0 S] -> [sqrt(F) 0; Kbar Sf]
      pre.setZero();
      pre(0, 0) = h_sqrt;
      pre.block(0, 1, 1, n) = Z * S;
      pre.block(1, 1, n, n) = S;
      const Eigen::MatrixXd post = lower_factor(pre);
      F = post(0, 0) * post(0, 0);
      PZ = post.block(1, 0, n, 1) * post(0, 0);
      Sf = post.block(1, 1, n, n);
      if (out) Pf = Sf * Sf.transpose();
    } else {
      PZ.noalias() = P * Z.transpose();
      F = Z.dot(PZ) + system.observation_var;
      Pf = P;
      Pf.noalias() -= PZ * (PZ.transpose() / F);
    }
    if (!std::isfinite(F) || F <= 0.0) {
      throw NumericalError("non-finite or non-positive innovation variance at t=" + std::to_string(t));
    }

    const double v = series[static_cast<std::size_t>(t)] - Z.dot(a);
    loglik -= 0.5 * (log_2pi + std::log(F) + v * v / F);
    af = a + PZ * (v / F);
    if (out) {
      out->innovation(t) = v;
      out->innovation_var(t) = F;
      out->gain.push_back(Tm * PZ / F);
      out->filtered_mean.push_back(af);
      out->filtered_cov.push_back(Pf);
    }

    a = Tm * af;
    if (square_root) {
      pred.leftCols(n) = Tm * Sf;
      pred.rightCols(n) = q_sqrt.asDiagonal();
      S = lower_factor(pred);
    } else {
      TPf = Tm * Pf;
      P = TPf * Tt;
      P.diagonal() += q_diag;
      symmetrize(P);
    }
  }
  return loglik;
}

}  // namespace

FilterResult kalman_filter(const StateSpace& system, std::span<const double> series, const FilterOptions& options) {
  FilterResult out;
  out.loglik = run_filter(system, series, options, &out);
  return out;
}

BsmComponents kalman_smoother(const StateSpace& system, std::span<const double> series, const FilterOptions& options) {
  const auto filt = kalman_filter(system, series, options);
  const auto n = system.state_dim();
  const auto T = static_cast<Eigen::Index>(series.size());
  const auto& Z = system.observation;

  BsmComponents out;
  out.loglik = filt.loglik;
  out.trend.resize(T);
  out.drift.resize(T);
  out.seasonal.resize(T);
  out.noise.resize(T);
  out.state_cov.resize(series.size());

  Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index t = T - 1; t >= 0; --t) {
    const auto ut = static_cast<std::size_t>(t);
    const double F = filt.innovation_var(t);
    const Eigen::MatrixXd L = system.transition - filt.gain[ut] * Z;
    r = Z.transpose() * (filt.innovation(t) / F) + L.transpose() * r;
    N = Z.transpose() * Z / F + L.transpose() * N * L;
    symmetrize(N);

    const auto& a = filt.predicted_mean[ut];
    const auto& P = filt.predicted_cov[ut];
    const Eigen::VectorXd alpha = a + P * r;
    Eigen::MatrixXd V = P - P * N * P;
    symmetrize(V);
    // Clip round-off negatives so every smoothed covariance is PSD.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(V);
    if (eig.eigenvalues().minCoeff() < 0.0) {
      V = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).asDiagonal() * eig.eigenvectors().transpose();
      symmetrize(V);
    }
    out.state_cov[ut] = std::move(V);

    out.trend(t) = alpha(0);
    out.drift(t) = alpha(1);
    out.seasonal(t) = alpha(2);
    out.noise(t) = series[ut] - alpha(0) - alpha(2);
  }
  return out;
}

double log_likelihood(const BsmSpec& spec, std::span<const double> series, const FilterOptions& options) {
  return run_filter(build_state_space(spec), series, options, nullptr);
}

namespace {

constexpr double kVarianceFloor = 1e-12;
constexpr double kLogMin = -30.0;
constexpr double kLogMax = 8.0;

struct Objective {
  std::span<const double> series;
  int period;
  double scale;
  FilterOptions filter;
  int evaluations = 0;

  BsmSpec spec_at(const double* theta) const {
    auto var = [&](double th) { return scale * (kVarianceFloor + std::exp(std::clamp(th, kLogMin, kLogMax))); };
    return BsmSpec{period, var(theta[0]), var(theta[1]), var(theta[2]), var(theta[3])};
  }

  // Negative mean log-likelihood; +inf-like penalty when the filter fails.
  double value(const double* theta) {
    ++evaluations;
    try {
      return -log_likelihood(spec_at(theta), series, filter) / static_cast<double>(series.size());
    } catch (const NumericalError&) {
      return 1e100;
    }
  }
};

double gsl_f(const gsl_vector* x, void* params) {
  return static_cast<Objective*>(params)->value(x->data);
}

void gsl_df(const gsl_vector* x, void* params, gsl_vector* g) {
  auto* obj = static_cast<Objective*>(params);
  std::array<double, 4> th{};
  for (std::size_t i = 0; i < 4; ++i) th[i] = gsl_vector_get(x, i);
  constexpr double h = 1e-5;
  for (std::size_t i = 0; i < 4; ++i) {
    auto up = th;
    auto dn = th;
    up[i] += h;
    dn[i] -= h;
    gsl_vector_set(g, i, (obj->value(up.data()) - obj->value(dn.data())) / (2.0 * h));
  }
}

void gsl_fdf(const gsl_vector* x, void* params, double* f, gsl_vector* g) {
  *f = gsl_f(x, params);
  gsl_df(x, params, g);
}

struct MinimizerDeleter {
  void operator()(gsl_multimin_fdfminimizer* m) const { gsl_multimin_fdfminimizer_free(m); }
};
struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};

struct LocalOptimum {
  std::array<double, 4> theta{};
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

LocalOptimum minimize_from(Objective& obj, const std::array<double, 4>& start, const EstimateOptions& options) {
  gsl_multimin_function_fdf fdf{&gsl_f, &gsl_df, &gsl_fdf, 4, &obj};
  std::unique_ptr<gsl_vector, VectorDeleter> x(gsl_vector_alloc(4));
  for (std::size_t i = 0; i < 4; ++i) gsl_vector_set(x.get(), i, start[i]);
  std::unique_ptr<gsl_multimin_fdfminimizer, MinimizerDeleter> solver(
      gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, 4));
  gsl_multimin_fdfminimizer_set(solver.get(), &fdf, x.get(), 0.5, 0.1);

  // Convergence is judged on the total log-likelihood, not the per-observation mean.
  const double n = static_cast<double>(obj.series.size());
  double previous = solver->f;
  LocalOptimum best;
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    const int status = gsl_multimin_fdfminimizer_iterate(solver.get());
    const double current = solver->f;
    const bool stalled = status == GSL_ENOPROG || status == GSL_EFAILED;
    if (stalled || std::abs(previous - current) * n < options.tolerance) {
      for (std::size_t i = 0; i < 4; ++i) best.theta[i] = gsl_vector_get(solver->x, i);
      best.value = current;
      best.iterations = iter;
      return best;
    }
    if (status != GSL_SUCCESS && status != GSL_CONTINUE) break;
    previous = current;
  }
  throw NumericalError("BSM variance optimizer did not converge within " + std::to_string(options.max_iterations) +
                       " iterations");
}

}  // namespace

BsmFit estimate_bsm(std::span<const double> series, const EstimateOptions& options) {
  if (options.seasonal_period < 2) throw DataError("seasonal period must be at least 2");
  if (series.size() < static_cast<std::size_t>(3 * options.seasonal_period)) {
    throw DataError("BSM estimation needs at least three seasonal cycles");
  }
  for (double v : series) {
    if (!std::isfinite(v)) throw DataError("BSM series contains non-finite values");
  }

  gsl_set_error_handler_off();
  Objective obj{series, options.seasonal_period, series_scale(series), options.filter};

  // A few spread-out starts guard against the flat ridges typical of
  // variance-component likelihoods.
  const std::array<std::array<double, 4>, 3> starts{{
      {-2.0, -4.0, -8.0, -6.0},
      {-1.0, -1.0, -6.0, -3.0},
      {-4.0, -6.0, -12.0, -10.0},
  }};
  LocalOptimum best;
  int total_iterations = 0;
  for (const auto& start : starts) {
    auto local = minimize_from(obj, start, options);
    total_iterations += local.iterations;
    if (local.value < best.value) best = local;
  }

  BsmFit fit;
  fit.spec = obj.spec_at(best.theta.data());
  fit.components = kalman_smoother(build_state_space(fit.spec), series, options.filter);
  fit.iterations = total_iterations;
  return fit;
}

namespace {

void check_month(int month) {
  if (month < 1 || month > 12) throw DataError("month must be in 1..12");
}

}  // namespace

Eigen::VectorXd mean_seasonal_by_month(const BsmComponents& components, YearMonth start) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(12);
  Eigen::VectorXd count = Eigen::VectorXd::Zero(12);
  for (Eigen::Index t = 0; t < components.seasonal.size(); ++t) {
    const int m = start.plus_months(t).month - 1;
    sum(m) += components.seasonal(t);
    count(m) += 1.0;
  }
  return sum.cwiseQuotient(count.cwiseMax(1.0));
}

AnnualSeries synthetic_month(const BsmComponents& components, YearMonth start, int month, SyntheticMode mode) {
  check_month(month);
  const double mean_seasonal = mean_seasonal_by_month(components, start)(month - 1);
  AnnualSeries out;
  for (Eigen::Index t = 0; t < components.trend.size(); ++t) {
    const auto date = start.plus_months(t);
    if (date.month != month) continue;
    if (out.values.empty()) out.first_year = date.year;
    const double seasonal = mode == SyntheticMode::static_mean ? mean_seasonal : components.seasonal(t);
    out.values.push_back(components.trend(t) + seasonal);
  }
  return out;
}

Eigen::VectorXd evolving_adjusted_trend(const BsmComponents& components, YearMonth start, int month) {
  check_month(month);
  const auto T = components.trend.size();
  if (T == 0) return {};
  const auto end = start.plus_months(T - 1);
  Eigen::VectorXd out(T);
  for (Eigen::Index t = 0; t < T; ++t) {
    YearMonth target{start.plus_months(t).year, month};
    while (target < start) target.year += 1;
    while (target > end) target.year -= 1;
    out(t) = components.trend(t) + components.seasonal(months_between(start, target));
  }
  return out;
}

}  // namespace svarkit::bsm
