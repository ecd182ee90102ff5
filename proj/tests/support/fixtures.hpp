#pragma once

// Test-only model generators and brute-force simulators. Nothing here calls
// into the recursions under test.

#include "svarkit/bsm.hpp"
#include "svarkit/bvar.hpp"
#include "svarkit/panel.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace svarkit::testing {

inline Eigen::MatrixXd normal_matrix(std::mt19937_64& gen, Eigen::Index rows, Eigen::Index cols, double sd = 1.0) {
  std::normal_distribution<double> dist(0.0, sd);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = dist(gen);
  return m;
}

inline double companion_radius(const bvar::VarCoefficients& c) {
  const auto M = c.n_vars();
  const int P = c.n_lags();
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(M * P, M * P);
  for (int p = 0; p < P; ++p) F.block(0, p * M, M, M) = c.lags[static_cast<std::size_t>(p)];
  if (P > 1) F.bottomLeftCorner(M * (P - 1), M * (P - 1)).setIdentity();
  Eigen::EigenSolver<Eigen::MatrixXd> es(F, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Random VAR with companion spectral radius <= max_radius.
inline bvar::VarCoefficients random_stable_var(std::mt19937_64& gen, Eigen::Index m, int p, double max_radius = 0.9) {
  bvar::VarCoefficients c;
  c.intercept = normal_matrix(gen, m, 1, 0.5).col(0);
  for (int k = 0; k < p; ++k) c.lags.push_back(normal_matrix(gen, m, m, 0.4 / (k + 1)));
  const double rho = companion_radius(c);
  if (rho > max_radius) {
    // Scaling Phi_p by a^p scales every companion eigenvalue by a.
    const double a = max_radius / rho;
    for (int k = 0; k < p; ++k) c.lags[static_cast<std::size_t>(k)] *= std::pow(a, k + 1);
  }
  return c;
}

/// Random lower-triangular impact with positive diagonal.
inline Eigen::MatrixXd random_impact(std::mt19937_64& gen, Eigen::Index m) {
  Eigen::MatrixXd c = normal_matrix(gen, m, m, 0.5).triangularView<Eigen::Lower>();
  std::uniform_real_distribution<double> diag(0.5, 1.5);
  for (Eigen::Index i = 0; i < m; ++i) c(i, i) = diag(gen);
  return c;
}

/// Level simulation of y_t = c + sum Phi_p y_{t-p} + shocks.row(t), starting
/// from `initial` (P rows). Returns the T simulated rows.
inline Eigen::MatrixXd simulate_levels(const bvar::VarCoefficients& c, const Eigen::MatrixXd& initial,
                                       const Eigen::MatrixXd& shocks) {
  const auto M = c.n_vars();
  const int P = c.n_lags();
  const auto T = shocks.rows();
  Eigen::MatrixXd all(P + T, M);
  all.topRows(P) = initial.bottomRows(P);
  for (Eigen::Index t = 0; t < T; ++t) {
    Eigen::VectorXd y = c.intercept;
    for (int p = 1; p <= P; ++p) y += c.lags[static_cast<std::size_t>(p - 1)] * all.row(P + t - p).transpose();
    all.row(P + t) = y.transpose() + shocks.row(t);
  }
  return all.bottomRows(T);
}

/// Simulates T observations of a VAR with u_t = C eps_t after a burn-in.
inline Eigen::MatrixXd simulate_var(const bvar::VarCoefficients& c, const Eigen::MatrixXd& impact, Eigen::Index T,
                                    std::mt19937_64& gen, Eigen::Index burn = 200) {
  const auto M = c.n_vars();
  const Eigen::MatrixXd eps = normal_matrix(gen, T + burn, M);
  const Eigen::MatrixXd u = eps * impact.transpose();
  const Eigen::MatrixXd init = Eigen::MatrixXd::Zero(c.n_lags(), M);
  return simulate_levels(c, init, u).bottomRows(T);
}

/// Shocked minus unshocked level simulation with one structural impulse at t=0.
inline Eigen::MatrixXd simulated_irf(const bvar::VarCoefficients& c, const Eigen::MatrixXd& impact, int shock, int H,
                                     double scale = 1.0) {
  const auto M = c.n_vars();
  const Eigen::MatrixXd init = Eigen::MatrixXd::Constant(c.n_lags(), M, 0.7);
  Eigen::MatrixXd shocks = Eigen::MatrixXd::Zero(H + 1, M);
  const Eigen::MatrixXd base = simulate_levels(c, init, shocks);
  shocks.row(0) = scale * impact.col(shock).transpose();
  return simulate_levels(c, init, shocks) - base;
}

/// Level simulation in which the shut variables' structural shocks are solved
/// each period (dense LU) so that their levels stay on the unshocked path.
/// Returns shocked minus unshocked levels.
inline Eigen::MatrixXd simulated_shutdown(const bvar::VarCoefficients& c, const Eigen::MatrixXd& impact, int shock,
                                          const std::vector<int>& shut, int H) {
  const auto M = c.n_vars();
  const int P = c.n_lags();
  const Eigen::MatrixXd init = Eigen::MatrixXd::Constant(P, M, 0.3);
  const Eigen::MatrixXd base = simulate_levels(c, init, Eigen::MatrixXd::Zero(H + 1, M));
  Eigen::MatrixXd eps = Eigen::MatrixXd::Zero(H + 1, M);
  eps(0, shock) = 1.0;
  const auto nz = static_cast<Eigen::Index>(shut.size());
  Eigen::MatrixXd czz(nz, nz);
  for (Eigen::Index a = 0; a < nz; ++a)
    for (Eigen::Index b = 0; b < nz; ++b) czz(a, b) = impact(shut[a], shut[b]);
  for (int h = 0; h <= H; ++h) {
    const Eigen::MatrixXd path = simulate_levels(c, init, eps.topRows(h + 1) * impact.transpose());
    Eigen::VectorXd gap(nz);
    for (Eigen::Index a = 0; a < nz; ++a) gap(a) = path(h, shut[a]) - base(h, shut[a]);
    const Eigen::VectorXd e = czz.fullPivLu().solve(-gap);
    for (Eigen::Index a = 0; a < nz; ++a) eps(h, shut[a]) += e(a);
  }
  return simulate_levels(c, init, eps * impact.transpose()) - base;
}

struct SimulatedBsm {
  Eigen::VectorXd y, trend, seasonal, noise;
};

// Direct simulation of the structural equations, independent of the state-space matrices.
inline SimulatedBsm simulate_bsm(const bsm::BsmSpec& s, int T, std::mt19937_64& gen, double level0 = 10.0, double drift0 = 0.0,
                          const std::vector<double>& seasonal0 = {}) {
  std::normal_distribution<double> z(0.0, 1.0);
  const int S = s.seasonal_period;
  std::vector<double> gamma(static_cast<std::size_t>(S - 1), 0.0);
  if (!seasonal0.empty()) gamma = seasonal0;  // gamma[0] most recent
  double mu = level0, beta = drift0;
  SimulatedBsm out{Eigen::VectorXd(T), Eigen::VectorXd(T), Eigen::VectorXd(T), Eigen::VectorXd(T)};
  for (int t = 0; t < T; ++t) {
    mu = mu + beta + std::sqrt(s.level_var) * z(gen);
    beta = beta + std::sqrt(s.slope_var) * z(gen);
    double g = std::sqrt(s.seasonal_var) * z(gen);
    for (double v : gamma) g -= v;
    gamma.insert(gamma.begin(), g);
    gamma.pop_back();
    const double eta = std::sqrt(s.irregular_var) * z(gen);
    out.trend(t) = mu;
    out.seasonal(t) = g;
    out.noise(t) = eta;
    out.y(t) = mu + g + eta;
  }
  return out;
}

inline std::vector<double> seasonal_start(double amplitude) {
  // Pattern a*cos(2 pi m / 12); the state holds the 11 most recent values.
  std::vector<double> g;
  for (int k = 1; k <= 11; ++k) g.push_back(amplitude * std::cos(2.0 * std::numbers::pi * (-k) / 12.0));
  return g;
}

inline TimeSeriesPanel make_panel(const Eigen::MatrixXd& values, YearMonth start = {1980, 1}) {
  std::vector<VariableSpec> vars;
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    vars.push_back({"v" + std::to_string(j), "", static_cast<int>(j)});
  }
  return TimeSeriesPanel(start, values, vars);
}

}  // namespace svarkit::testing
