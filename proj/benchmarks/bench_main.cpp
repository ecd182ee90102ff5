#include "svarkit/bsm.hpp"
#include "svarkit/bvar.hpp"
#include "svarkit/irf.hpp"
#include "svarkit/rng.hpp"
#include "svarkit/scenario.hpp"
#include "svarkit/svar.hpp"
#include "svarkit/tma.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace svarkit;

namespace {

// Persistent random VAR(P) data with M variables and T rows.
Eigen::MatrixXd sample_data(Eigen::Index m, Eigen::Index t, std::uint64_t seed) {
  auto gen = make_stream(seed, 0);
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(t, m);
  for (Eigen::Index i = 1; i < t; ++i) y.row(i) = 0.8 * y.row(i - 1) + standard_normal(gen, m).transpose();
  return y;
}

bvar::BvarPosterior posterior_for(Eigen::Index m, int p) {
  bvar::MinnesotaHyper h;
  h.lags = p;
  return bvar::fit(sample_data(m, 468, 1), h);
}

void BM_Posterior(benchmark::State& state) {
  const auto m = state.range(0);
  const int p = static_cast<int>(state.range(1));
  const auto data = sample_data(m, 468, 1);
  bvar::MinnesotaHyper h;
  h.lags = p;
  for (auto _ : state) benchmark::DoNotOptimize(bvar::fit(data, h));
}
BENCHMARK(BM_Posterior)->Args({8, 12})->Args({18, 3})->Unit(benchmark::kMillisecond);

void BM_PosteriorDraws(benchmark::State& state) {
  const auto post = posterior_for(8, 12);
  for (auto _ : state) benchmark::DoNotOptimize(bvar::draw_posterior(post, static_cast<int>(state.range(0)), 3));
}
BENCHMARK(BM_PosteriorDraws)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_ImpulseResponse(benchmark::State& state) {
  const auto post = posterior_for(8, 12);
  const auto coeffs = post.mean_coefficients();
  const auto c = svar::cholesky_identify(post.sigma_u);
  for (auto _ : state) benchmark::DoNotOptimize(irf::impulse_response(coeffs, c, 0, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_ImpulseResponse)->Arg(60)->Arg(240);

void BM_IrfBands(benchmark::State& state) {
  const auto post = posterior_for(8, 12);
  const auto draws = bvar::draw_posterior(post, 500, 4);
  for (auto _ : state) benchmark::DoNotOptimize(irf::irf_bands(draws, post.sigma_u, 0, 60));
}
BENCHMARK(BM_IrfBands)->Unit(benchmark::kMillisecond);

void BM_Shutdown(benchmark::State& state) {
  const auto post = posterior_for(8, 12);
  const auto coeffs = post.mean_coefficients();
  const auto c = svar::cholesky_identify(post.sigma_u);
  const std::vector<int> shut{6, 7};
  for (auto _ : state) benchmark::DoNotOptimize(tma::shutdown_irf(coeffs, c, 0, shut, 60));
}
BENCHMARK(BM_Shutdown);

void BM_Forecast(benchmark::State& state) {
  const auto data = sample_data(8, 468, 1);
  bvar::MinnesotaHyper h;
  const auto post = bvar::fit(data, h);
  const auto draws = bvar::draw_posterior(post, 200, 5);
  const auto c = svar::cholesky_identify(post.sigma_u);
  scenario::ForecastSetup setup;
  setup.history = data;
  setup.first_date = {2019, 1};
  setup.horizon = static_cast<int>(state.range(0));
  setup.shock_mode = scenario::ShockMode::sampled;
  setup.seed = 6;
  setup.record_shocks = false;
  for (auto _ : state) benchmark::DoNotOptimize(scenario::unconditional_forecast(draws, c, setup));
}
BENCHMARK(BM_Forecast)->Arg(120)->Arg(984)->Unit(benchmark::kMillisecond);

std::vector<double> seasonal_series(int t) {
  auto gen = make_stream(7, 0);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> y(static_cast<std::size_t>(t));
  double level = 10.0;
  for (int i = 0; i < t; ++i) {
    level += 0.05 * z(gen);
    y[static_cast<std::size_t>(i)] = level + 3.0 * std::cos(2.0 * std::numbers::pi * i / 12.0) + 0.3 * z(gen);
  }
  return y;
}

void BM_KalmanLoglik(benchmark::State& state) {
  const auto y = seasonal_series(static_cast<int>(state.range(0)));
  const bsm::BsmSpec spec{12, 0.09, 0.0025, 1e-6, 0.001};
  for (auto _ : state) benchmark::DoNotOptimize(bsm::log_likelihood(spec, y));
}
BENCHMARK(BM_KalmanLoglik)->Arg(480)->Unit(benchmark::kMicrosecond);

void BM_KalmanSmoother(benchmark::State& state) {
  const auto y = seasonal_series(480);
  const auto system = bsm::build_state_space({12, 0.09, 0.0025, 1e-6, 0.001});
  for (auto _ : state) benchmark::DoNotOptimize(bsm::kalman_smoother(system, y));
}
BENCHMARK(BM_KalmanSmoother)->Unit(benchmark::kMillisecond);

void BM_EstimateBsm(benchmark::State& state) {
  const auto y = seasonal_series(480);
  for (auto _ : state) benchmark::DoNotOptimize(bsm::estimate_bsm(y));
}
BENCHMARK(BM_EstimateBsm)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
