#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace svarkit {

/// Independent random stream for work item `index` under a master seed.
/// Streams depend only on (seed, index), so work items can run in any order.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

inline Eigen::VectorXd standard_normal(std::mt19937_64& gen, Eigen::Index n) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = dist(gen);
  return z;
}

}  // namespace svarkit
