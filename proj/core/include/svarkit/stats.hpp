#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace svarkit::stats {

/// Sample quantile by linear interpolation between order statistics
/// (Hyndman-Fan type 7, the R default). `sorted` must be ascending.
double quantile_sorted(std::span<const double> sorted, double prob);

/// Convenience overload; copies and sorts.
double quantile(std::vector<double> values, double prob);

/// Column means of a T x M matrix.
Eigen::VectorXd column_means(const Eigen::MatrixXd& x);

/// Covariance with divisor `rows - ddof`.
Eigen::MatrixXd covariance(const Eigen::MatrixXd& x, int ddof = 1);

/// Pointwise summary of equally shaped per-draw matrices.
struct Bands {
  std::vector<double> probs;
  std::vector<Eigen::MatrixXd> quantiles;  // one matrix per entry of probs
  Eigen::MatrixXd mean;

  /// Quantile matrix for probability `prob` (must be one of `probs`).
  [[nodiscard]] const Eigen::MatrixXd& at(double prob) const;
};

/// Elementwise quantiles and mean across draws. Reduction order is fixed by
/// draw index, so the result is deterministic.
Bands summarize(std::span<const Eigen::MatrixXd> draws, std::vector<double> probs);

/// Spectral radius of a square matrix (largest eigenvalue modulus).
double spectral_radius(const Eigen::MatrixXd& a);

}  // namespace svarkit::stats
