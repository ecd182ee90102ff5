#include "svarkit/scenario.hpp"

#include "svarkit/error.hpp"
#include "svarkit/rng.hpp"
#include "svarkit/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <string>

namespace svarkit::scenario {

stats::Bands ScenarioResult::fan(std::vector<double> probs) const { return stats::summarize(paths, std::move(probs)); }

namespace {

struct ActiveCondition {
  int variable;
  const Eigen::VectorXd* targets;
};

std::vector<ActiveCondition> sorted_conditions(std::span<const ConditionPath> conditions, Eigen::Index m) {
  if (static_cast<Eigen::Index>(conditions.size()) > m) throw DataError("more conditions than variables");
  std::vector<ActiveCondition> out;
  for (const auto& c : conditions) {
    if (c.variable < 0 || c.variable >= m) throw DataError("conditioned variable index out of range");
    out.push_back({c.variable, &c.targets});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.variable < b.variable; });
  for (std::size_t k = 1; k < out.size(); ++k) {
    if (out[k].variable == out[k - 1].variable) throw DataError("conditioned variables must be distinct");
  }
  return out;
}

void simulate_draw(const bvar::VarCoefficients& coeffs, const Eigen::MatrixXd& impact, const ForecastSetup& setup,
                   const std::vector<ActiveCondition>& conds, std::size_t draw_index, Eigen::MatrixXd& path,
                   Eigen::MatrixXd* shocks) {
  const auto M = coeffs.n_vars();
  const int P = coeffs.n_lags();
  const int H = setup.horizon;
  path.resize(H, M);
  if (shocks) shocks->setZero(H, M);

  auto gen = make_stream(setup.seed, draw_index);
  auto lagged = [&](int h, int p) -> Eigen::RowVectorXd {
    const int idx = h - p;  // row in path, negative reaches into history
    if (idx >= 0) return path.row(idx);
    return setup.history.row(setup.history.rows() + idx);
  };

  std::vector<int> active;
  for (int h = 0; h < H; ++h) {
    Eigen::RowVectorXd pre = coeffs.intercept.transpose();
    for (int p = 1; p <= P; ++p) pre.noalias() += lagged(h, p) * coeffs.lags[static_cast<std::size_t>(p - 1)].transpose();
    if (coeffs.has_trend()) pre += (setup.trend_index + h) * coeffs.trend.transpose();

    Eigen::VectorXd eps = setup.shock_mode == ShockMode::sampled ? standard_normal(gen, M) : Eigen::VectorXd::Zero(M);

    active.clear();
    for (std::size_t k = 0; k < conds.size(); ++k) {
      if (h < conds[k].targets->size()) active.push_back(static_cast<int>(k));
    }
    if (!active.empty()) {
      const auto na = static_cast<Eigen::Index>(active.size());
      for (int k : active) eps(conds[static_cast<std::size_t>(k)].variable) = 0.0;
      const Eigen::VectorXd base = pre.transpose() + impact * eps;
      Eigen::MatrixXd c_kk(na, na);
      Eigen::VectorXd gap(na);
      for (Eigen::Index a = 0; a < na; ++a) {
        const auto& ca = conds[static_cast<std::size_t>(active[static_cast<std::size_t>(a)])];
        gap(a) = (*ca.targets)(h) - base(ca.variable);
        for (Eigen::Index b = 0; b < na; ++b) {
          c_kk(a, b) = impact(ca.variable, conds[static_cast<std::size_t>(active[static_cast<std::size_t>(b)])].variable);
        }
      }
      if ((c_kk.diagonal().array().abs() < 1e-300).any()) {
        throw NumericalError("restricted impact sub-matrix is singular");
      }
      const Eigen::VectorXd solved = c_kk.triangularView<Eigen::Lower>().solve(gap);
      for (Eigen::Index a = 0; a < na; ++a) {
        eps(conds[static_cast<std::size_t>(active[static_cast<std::size_t>(a)])].variable) = solved(a);
      }
    }
    if (setup.shock_mode == ShockMode::zero && active.empty()) {
      path.row(h) = pre;
    } else {
      path.row(h) = pre + (impact * eps).transpose();
    }
    if (shocks) shocks->row(h) = eps.transpose();
  }
}

ScenarioResult run(const bvar::CoefficientDraws& draws, const Eigen::MatrixXd& impact, const ForecastSetup& setup,
                   const std::vector<ActiveCondition>& conds) {
  if (draws.size() == 0) throw DataError("no posterior draws");
  if (setup.horizon < 1) throw DataError("forecast horizon must be at least 1");
  const auto& first = draws.draws.front();
  if (setup.history.rows() < first.n_lags() || setup.history.cols() != first.n_vars()) {
    throw DataError("forecast history must supply P rows of every variable");
  }
  if (impact.rows() != first.n_vars() || impact.cols() != first.n_vars()) {
    throw DataError("impact matrix does not match the model");
  }
  ScenarioResult out;
  out.first_date = setup.first_date;
  out.paths.resize(draws.size());
  if (setup.record_shocks) out.shocks.resize(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) {
    simulate_draw(draws.draws[i], impact, setup, conds, i, out.paths[i],
                  setup.record_shocks ? &out.shocks[i] : nullptr);
  }
  return out;
}

}  // namespace

ScenarioResult unconditional_forecast(const bvar::CoefficientDraws& draws, const Eigen::MatrixXd& impact,
                                      const ForecastSetup& setup) {
  return run(draws, impact, setup, {});
}

ScenarioResult conditional_forecast(const bvar::CoefficientDraws& draws, const Eigen::MatrixXd& impact,
                                    const ForecastSetup& setup, std::span<const ConditionPath> conditions) {
  return run(draws, impact, setup, sorted_conditions(conditions, impact.rows()));
}

ScenarioResult frozen_channel_forecast(const bvar::CoefficientDraws& draws, const Eigen::MatrixXd& impact,
                                       const ForecastSetup& setup, std::span<const ConditionPath> conditions,
                                       std::span<const FrozenLevel> frozen) {
  std::vector<ConditionPath> all(conditions.begin(), conditions.end());
  for (const auto& f : frozen) {
    for (const auto& c : conditions) {
      if (c.variable == f.variable) throw DataError("a variable cannot be both frozen and conditioned");
    }
    all.push_back({f.variable, Eigen::VectorXd::Constant(setup.horizon, f.level)});
  }
  return conditional_forecast(draws, impact, setup, all);
}

Eigen::MatrixXd deterministic_component(const bvar::VarCoefficients& coeffs, const Eigen::MatrixXd& initial,
                                        Eigen::Index span) {
  const int P = coeffs.n_lags();
  if (initial.rows() < P || initial.cols() != coeffs.n_vars()) {
    throw DataError("deterministic component needs P initial observations");
  }
  if (span < P) throw DataError("span shorter than the lag order");
  Eigen::MatrixXd out(span, coeffs.n_vars());
  out.topRows(P) = initial.topRows(P);
  for (Eigen::Index t = P; t < span; ++t) {
    Eigen::RowVectorXd y = coeffs.intercept.transpose();
    for (int p = 1; p <= P; ++p) y.noalias() += out.row(t - p) * coeffs.lags[static_cast<std::size_t>(p - 1)].transpose();
    if (coeffs.has_trend()) y += static_cast<double>(t) * coeffs.trend.transpose();
    out.row(t) = y;
  }
  return out;
}

Eigen::MatrixXd deterministic_component(const bvar::CoefficientDraws& draws, const Eigen::MatrixXd& initial,
                                        Eigen::Index span) {
  if (draws.size() == 0) throw DataError("no posterior draws");
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(span, initial.cols());
  for (const auto& d : draws.draws) sum += deterministic_component(d, initial, span);
  return sum / static_cast<double>(draws.size());
}

std::optional<Eigen::Index> first_crossing_index(std::span<const double> path, double threshold) {
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path[i] <= threshold) return static_cast<Eigen::Index>(i);
  }
  return std::nullopt;
}

std::optional<YearMonth> CrossingResult::quantile_date(std::size_t k, YearMonth first_date) const {
  const double q = quantile_index.at(k);
  if (!std::isfinite(q)) return std::nullopt;
  return first_date.plus_months(std::lround(q));
}

CrossingResult first_crossing(const ScenarioResult& result, const CrossingQuery& query, std::vector<double> probs) {
  CrossingResult out;
  out.probs = std::move(probs);
  std::vector<double> keyed;
  keyed.reserve(result.paths.size());
  std::size_t never = 0;
  for (const auto& path : result.paths) {
    if (query.variable < 0 || query.variable >= path.cols()) throw DataError("crossing variable out of range");
    std::optional<Eigen::Index> hit;
    for (Eigen::Index h = 0; h < path.rows(); ++h) {
      if (query.month && result.first_date.plus_months(h).month != *query.month) continue;
      if (path(h, query.variable) + query.offset <= query.threshold) {
        hit = h;
        break;
      }
    }
    out.first_index.push_back(hit);
    if (!hit) ++never;
    keyed.push_back(hit ? static_cast<double>(*hit) : std::numeric_limits<double>::infinity());
  }
  out.share_never = result.paths.empty() ? 0.0 : static_cast<double>(never) / static_cast<double>(result.paths.size());
  std::sort(keyed.begin(), keyed.end());
  for (double p : out.probs) {
    if (keyed.empty()) {
      out.quantile_index.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    // Type-7 interpolation; touching a never-crossing draw makes the quantile +inf.
    const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(keyed.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, keyed.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    if (!std::isfinite(keyed[lo]) || (frac > 0.0 && !std::isfinite(keyed[hi]))) {
      out.quantile_index.push_back(std::numeric_limits<double>::infinity());
    } else {
      out.quantile_index.push_back(stats::quantile_sorted(keyed, p));
    }
  }
  return out;
}

std::vector<std::pair<double, double>> load_scenario(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty scenario file");
  const auto header = io::split(line, ',');
  if (header.size() < 2 || io::trim(header[0]) != "date") throw DataError("scenario header must be 'date,value'");
  std::vector<std::pair<double, double>> points;
  while (std::getline(in, line)) {
    if (io::trim(line).empty()) continue;
    const auto cells = io::split(line, ',');
    if (cells.size() < 2) throw DataError("scenario row needs a date and a value");
    const auto date = io::trim(cells[0]);
    double serial = 0.0;
    if (date.find('-') != std::string_view::npos) {
      serial = static_cast<double>(parse_year_month(date).serial());
    } else {
      const int year = static_cast<int>(io::parse_double(date));
      serial = static_cast<double>(YearMonth{year, 7}.serial());
    }
    if (!points.empty() && serial <= points.back().first) throw DataError("scenario dates must increase");
    points.emplace_back(serial, io::parse_double(cells[1]));
  }
  if (points.empty()) throw DataError("scenario file has no rows");
  return points;
}

Eigen::VectorXd scenario_targets(std::span<const std::pair<double, double>> points, YearMonth first, int horizon) {
  if (points.empty()) throw DataError("empty scenario");
  Eigen::VectorXd out(horizon);
  for (int h = 0; h < horizon; ++h) {
    const double s = static_cast<double>(first.serial() + h);
    if (s <= points.front().first) {
      out(h) = points.front().second;
    } else if (s >= points.back().first) {
      out(h) = points.back().second;
    } else {
      const auto it = std::upper_bound(points.begin(), points.end(), s,
                                       [](double v, const std::pair<double, double>& p) { return v < p.first; });
      const auto& [x1, y1] = *it;
      const auto& [x0, y0] = *(it - 1);
      out(h) = y0 + (y1 - y0) * (s - x0) / (x1 - x0);
    }
  }
  return out;
}

}  // namespace svarkit::scenario
