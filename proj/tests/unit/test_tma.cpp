#include "svarkit/error.hpp"
#include "svarkit/irf.hpp"
#include "svarkit/tma.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

namespace svarkit {
namespace {

bvar::VarCoefficients var1(const Eigen::MatrixXd& phi) {
  bvar::VarCoefficients c;
  c.intercept = Eigen::VectorXd::Zero(phi.rows());
  c.lags.push_back(phi);
  return c;
}

TEST(ShutdownIrf, FeedbackRemoved) {
  const auto c = var1((Eigen::Matrix2d() << 0.5, 0.4, 0.2, 0.3).finished());
  const std::vector<int> z{1};
  const auto res = tma::shutdown_irf(c, Eigen::Matrix2d::Identity(), 0, z, 2);
  EXPECT_NEAR(res.baseline(2, 0), 0.33, 1e-15);
  EXPECT_NEAR(res.counterfactual(2, 0), 0.25, 1e-15);
  EXPECT_NEAR(res.counterfactual(1, 0), 0.5, 1e-15);
  EXPECT_NEAR(res.schedule.artificial(1, 0), -0.2, 1e-15);
  EXPECT_EQ(res.schedule.source_shock, 0);
  EXPECT_EQ(res.schedule.shut_set, z);
}

TEST(ShutdownIrf, NoFeedbackLeavesResponseUnchanged) {
  const auto c = var1((Eigen::Matrix2d() << 0.5, 0.0, 0.2, 0.3).finished());
  const std::vector<int> z{1};
  const auto res = tma::shutdown_irf(c, Eigen::Matrix2d::Identity(), 0, z, 10);
  for (int h = 0; h <= 10; ++h) {
    EXPECT_NEAR(res.counterfactual(h, 0), std::pow(0.5, h), 1e-15);
    EXPECT_EQ(res.counterfactual(h, 0), res.baseline(h, 0));
  }
}

TEST(ShutdownIrf, DirectChainThreeVariables) {
  const auto c = var1((Eigen::Matrix3d() << 0.5, 0.2, 0.1, 0.3, 0.4, 0.2, 0.3, 0.1, 0.4).finished());
  const Eigen::Matrix3d impact{{1, 0, 0}, {0.5, 1, 0}, {0.2, 0.4, 1}};
  const std::vector<int> z{1};
  const auto r = tma::shutdown_irf(c, impact, 0, z, 2).counterfactual;
  const Eigen::Matrix3d expected{{1, 0, 0}, {0.5, 0, 0.18}, {0.268, 0, 0.1476}};
  EXPECT_LT((r - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ShutdownIrf, NoPathIntoResponseVariables) {
  Eigen::Matrix3d phi{{0.5, 0.1, 0.0}, {0.2, 0.4, 0.0}, {0.3, 0.3, 0.6}};
  const Eigen::Matrix3d impact{{1, 0, 0}, {0.3, 1, 0}, {0.5, 0.2, 1}};
  const std::vector<int> z{2};
  const auto res = tma::shutdown_irf(var1(phi), impact, 0, z, 30);
  EXPECT_EQ(res.counterfactual.leftCols(2), res.baseline.leftCols(2));
  EXPECT_EQ(res.counterfactual.col(2), Eigen::VectorXd::Zero(31));
}

TEST(ShutdownIrf, ZeroingAndOracleOnRandomModels) {
  std::mt19937_64 gen(1);
  for (int k = 0; k < 40; ++k) {
    const int m = std::uniform_int_distribution<int>(3, 6)(gen);
    const int p = std::uniform_int_distribution<int>(1, 3)(gen);
    const auto c = testing::random_stable_var(gen, m, p);
    const auto impact = testing::random_impact(gen, m);
    std::vector<int> idx(static_cast<std::size_t>(m));
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), gen);
    const int shock = idx[0];
    const int nz = std::uniform_int_distribution<int>(1, m - 2)(gen);
    std::vector<int> z(idx.begin() + 1, idx.begin() + 1 + nz);
    const auto res = tma::shutdown_irf(c, impact, shock, z, 36);
    for (int v : z) EXPECT_LT(res.counterfactual.col(v).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_EQ(res.baseline, irf::impulse_response(c, impact, shock, 36));
    if (m == 4) {
      const auto oracle = testing::simulated_shutdown(c, impact, shock, z, 36);
      EXPECT_LT((res.counterfactual - oracle).cwiseAbs().maxCoeff(), 1e-9) << k;
    }
  }
}

TEST(ShutdownIrf, OracleOnFourVariableSystems) {
  std::mt19937_64 gen(2);
  for (int k = 0; k < 20; ++k) {
    const auto c = testing::random_stable_var(gen, 4, 2);
    const auto impact = testing::random_impact(gen, 4);
    const std::vector<int> z = k % 2 ? std::vector<int>{1, 3} : std::vector<int>{2};
    const auto res = tma::shutdown_irf(c, impact, 0, z, 24);
    const auto oracle = testing::simulated_shutdown(c, impact, 0, z, 24);
    EXPECT_LT((res.counterfactual - oracle).cwiseAbs().maxCoeff(), 1e-9) << k;
  }
}

TEST(ShutdownIrf, Errors) {
  const auto c = var1(Eigen::Matrix3d::Identity() * 0.5);
  const Eigen::Matrix3d id = Eigen::Matrix3d::Identity();
  const std::vector<int> has_shock{0}, dup{1, 1}, range{3};
  EXPECT_THROW((void)tma::shutdown_irf(c, id, 0, has_shock, 5), DataError);
  EXPECT_THROW((void)tma::shutdown_irf(c, id, 0, dup, 5), DataError);
  EXPECT_THROW((void)tma::shutdown_irf(c, id, 0, range, 5), DataError);
  Eigen::Matrix3d singular = id;
  singular(1, 1) = 0.0;
  const std::vector<int> z{1};
  EXPECT_THROW((void)tma::shutdown_irf(c, singular, 0, z, 5), NumericalError);
}

TEST(AmplificationShare, Values) {
  EXPECT_NEAR(*tma::amplification_share(-0.13, -0.10), 0.2307692307692308, 1e-12);
  EXPECT_EQ(*tma::amplification_share(-0.4, -0.4), 0.0);
  EXPECT_FALSE(tma::amplification_share(0.0, 0.1).has_value());
}

TEST(ShutdownBands, PerDrawConsistency) {
  std::mt19937_64 gen(3);
  const auto c = testing::random_stable_var(gen, 4, 1, 0.7);
  const auto data = testing::simulate_var(c, testing::random_impact(gen, 4), 300, gen);
  const auto post = bvar::fit(data, {0.9, 0.3, 0.5, 1.5, 100, 1, false});
  const auto draws = bvar::draw_posterior(post, 120, 5);
  const std::vector<int> z{1, 2};
  const auto bands = tma::shutdown_bands(draws, post.sigma_u, 0, z, 24);
  ASSERT_EQ(bands.per_draw.size(), 120u);
  const auto impact = svar::cholesky_identify(post.sigma_u);
  for (std::size_t i = 0; i < 120; i += 17) {
    const auto one = tma::shutdown_irf(draws.draws[i], impact, 0, z, 24);
    EXPECT_EQ(bands.per_draw[i].counterfactual, one.counterfactual);
  }
  for (int v : z) {
    EXPECT_LT(bands.counterfactual.mean.col(v).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT(bands.cumulative_counterfactual.at(0.95).col(v).cwiseAbs().maxCoeff(), 1e-9);
  }
  EXPECT_TRUE((bands.baseline.at(0.05).array() <= bands.baseline.at(0.95).array()).all());
}

}  // namespace
}  // namespace svarkit
