#include "svarkit/stats.hpp"

#include "svarkit/error.hpp"

#include <algorithm>
#include <cmath>

namespace svarkit::stats {

double quantile_sorted(std::span<const double> sorted, double prob) {
  if (sorted.empty()) throw Error("quantile of empty sample");
  if (prob <= 0.0) return sorted.front();
  if (prob >= 1.0) return sorted.back();
  const double pos = prob * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0 || sorted[lo] == sorted[hi]) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double quantile(std::vector<double> values, double prob) {
  std::sort(values.begin(), values.end());
  return quantile_sorted(values, prob);
}

Eigen::VectorXd column_means(const Eigen::MatrixXd& x) { return x.colwise().mean().transpose(); }

Eigen::MatrixXd covariance(const Eigen::MatrixXd& x, int ddof) {
  const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  return centered.transpose() * centered / static_cast<double>(x.rows() - ddof);
}

const Eigen::MatrixXd& Bands::at(double prob) const {
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (std::abs(probs[k] - prob) < 1e-12) return quantiles[k];
  }
  throw Error("quantile level not computed");
}

Bands summarize(std::span<const Eigen::MatrixXd> draws, std::vector<double> probs) {
  if (draws.empty()) throw Error("cannot summarize zero draws");
  const auto rows = draws.front().rows();
  const auto cols = draws.front().cols();
  Bands bands;
  bands.probs = std::move(probs);
  bands.quantiles.assign(bands.probs.size(), Eigen::MatrixXd(rows, cols));
  bands.mean = Eigen::MatrixXd::Zero(rows, cols);
  for (const auto& d : draws) {
    if (d.rows() != rows || d.cols() != cols) throw Error("draw shapes differ");
    bands.mean += d;
  }
  bands.mean /= static_cast<double>(draws.size());
  std::vector<double> cell(draws.size());
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (std::size_t k = 0; k < draws.size(); ++k) cell[k] = draws[k](i, j);
      std::sort(cell.begin(), cell.end());
      for (std::size_t q = 0; q < bands.probs.size(); ++q) {
        bands.quantiles[q](i, j) = quantile_sorted(cell, bands.probs[q]);
      }
    }
  }
  return bands;
}

double spectral_radius(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw NumericalError("eigenvalue computation failed");
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace svarkit::stats
