#include "svarkit/app/pipeline.hpp"

#include "svarkit/app/svg.hpp"
#include "svarkit/bsm.hpp"
#include "svarkit/bvar.hpp"
#include "svarkit/irf.hpp"
#include "svarkit/scenario.hpp"
#include "svarkit/svar.hpp"
#include "svarkit/text_io.hpp"
#include "svarkit/tma.hpp"

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#ifndef SVARKIT_VERSION
#define SVARKIT_VERSION "unknown"
#endif

namespace svarkit::app {

namespace fs = std::filesystem;
using json = nlohmann::json;
using Eigen::Index;

namespace {

const std::vector<double> kFanProbs{0.05, 0.25, 0.5, 0.75, 0.95};
const std::vector<double> kBandProbs{0.05, 0.5, 0.95};
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string fmt(double v) { return std::isfinite(v) ? io::format_double(v) : "NA"; }

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

void require(const fs::path& out, const std::vector<std::string>& names) {
  std::vector<std::string> missing;
  for (const auto& n : names) {
    if (!fs::exists(out / n)) missing.push_back(n);
  }
  if (!missing.empty()) throw MissingArtifact(std::move(missing));
}

std::vector<std::string> variable_names(const RunConfig& cfg) {
  std::vector<std::string> names(cfg.variables.size());
  for (const auto& v : cfg.variables) names[static_cast<std::size_t>(v.ordering_index)] = v.name;
  return names;
}

bool is_bsm(const RunConfig& cfg) { return cfg.deseason != SeasonalMethod::dummy; }

std::vector<std::string> bsm_variables(const RunConfig& cfg) {
  std::vector<std::string> out;
  for (const auto& n : variable_names(cfg)) {
    if (std::find(cfg.deseason_skip.begin(), cfg.deseason_skip.end(), n) == cfg.deseason_skip.end()) {
      out.push_back(n);
    }
  }
  return out;
}

std::vector<std::string> irf_shocks(const RunConfig& cfg) {
  return cfg.shocks.empty() ? variable_names(cfg) : cfg.shocks;
}

std::vector<int> shut_indices(const RunConfig& cfg, const ShutSpec& s) {
  std::vector<int> z;
  for (const auto& n : s.variables) z.push_back(cfg.index_of(n));
  return z;
}

double decimal_year(YearMonth ym) { return ym.year + (ym.month - 1) / 12.0; }

// Minimal CSV reader for our own artifacts (no quoting).
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Table read_table(const fs::path& path) {
  std::istringstream in(read_file(path));
  Table t;
  std::string line;
  if (std::getline(in, line)) t.header = io::split(line, ',');
  while (std::getline(in, line)) {
    if (!line.empty()) t.rows.push_back(io::split(line, ','));
  }
  return t;
}

std::string markdown(const Table& t) {
  std::string s = "|";
  for (const auto& h : t.header) s += " " + h + " |";
  s += "\n|";
  for (std::size_t i = 0; i < t.header.size(); ++i) s += "---|";
  s += "\n";
  for (const auto& r : t.rows) {
    s += "|";
    for (const auto& c : r) s += " " + c + " |";
    s += "\n";
  }
  return s;
}

// ---- deseason -------------------------------------------------------------

TimeSeriesPanel load_raw(const RunConfig& cfg) {
  std::ifstream in(cfg.data);
  if (!in) throw DataError("cannot open data file " + cfg.data.string());
  auto raw = load_panel(in, cfg.variables);
  return restrict_window(raw, cfg.first.value_or(raw.start()), cfg.last.value_or(raw.end()));
}

void write_seasonal(const fs::path& path, const Eigen::MatrixXd& addback, const std::vector<std::string>& names) {
  std::string s = "month";
  for (const auto& n : names) s += "," + n;
  s += "\n";
  for (Index m = 0; m < 12; ++m) {
    s += std::to_string(m + 1);
    for (Index j = 0; j < addback.cols(); ++j) s += "," + fmt(addback(m, j));
    s += "\n";
  }
  write_file(path, s);
}

Eigen::MatrixXd read_seasonal(const fs::path& path, Index m) {
  const auto t = read_table(path);
  if (t.rows.size() != 12 || static_cast<Index>(t.header.size()) != m + 1) {
    throw DataError("seasonal table has the wrong shape");
  }
  Eigen::MatrixXd a(12, m);
  for (Index r = 0; r < 12; ++r)
    for (Index j = 0; j < m; ++j) a(r, j) = io::parse_double(t.rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(j + 1)]);
  return a;
}

void run_deseason(const RunConfig& cfg, const fs::path& out) {
  const auto panel = load_raw(cfg);
  const auto names = variable_names(cfg);
  const std::set<std::string> skip(cfg.deseason_skip.begin(), cfg.deseason_skip.end());
  Eigen::MatrixXd addback = Eigen::MatrixXd::Zero(12, panel.cols());

  if (!is_bsm(cfg)) {
    auto [adjusted, fit] = deseason_dummies(panel, skip);
    addback = fit.monthly_means;
    std::ofstream po(out / "panel.csv", std::ios::binary);
    write_panel(po, adjusted);
  } else {
    Eigen::MatrixXd values = panel.values();
    std::string params = "variable,irregular_var,level_var,slope_var,seasonal_var,loglik,iterations\n";
    for (Index j = 0; j < panel.cols(); ++j) {
      const auto& name = names[static_cast<std::size_t>(j)];
      if (skip.contains(name)) continue;
      const Eigen::VectorXd series = panel.values().col(j);
      const auto fit = bsm::estimate_bsm(std::span<const double>(series.data(), static_cast<std::size_t>(series.size())));
      const auto& c = fit.components;
      if (cfg.deseason == SeasonalMethod::bsm_static) {
        values.col(j) = c.trend;
        addback.col(j) = bsm::mean_seasonal_by_month(c, panel.start());
      } else {
        values.col(j) = bsm::evolving_adjusted_trend(c, panel.start(), cfg.synthetic_month);
      }
      params += name + "," + fmt(fit.spec.irregular_var) + "," + fmt(fit.spec.level_var) + "," +
                fmt(fit.spec.slope_var) + "," + fmt(fit.spec.seasonal_var) + "," + fmt(c.loglik) + "," +
                std::to_string(fit.iterations) + "\n";
      std::string comp = "date,trend,drift,seasonal,noise\n";
      for (Index t = 0; t < panel.rows(); ++t) {
        comp += format_year_month(panel.date(t)) + "," + fmt(c.trend(t)) + "," + fmt(c.drift(t)) + "," +
                fmt(c.seasonal(t)) + "," + fmt(c.noise(t)) + "\n";
      }
      write_file(out / ("bsm_" + file_token(name) + ".csv"), comp);
    }
    write_file(out / "bsm_params.csv", params);
    std::ofstream po(out / "panel.csv", std::ios::binary);
    write_panel(po, TimeSeriesPanel(panel.start(), values, panel.variables()));
  }
  write_seasonal(out / "seasonal.csv", addback, names);
}

// ---- estimate -------------------------------------------------------------

TimeSeriesPanel read_panel(const RunConfig& cfg, const fs::path& out) {
  std::ifstream in(out / "panel.csv");
  if (!in) throw MissingArtifact({"panel.csv"});
  return load_panel(in, cfg.variables);
}

json hyper_json(const bvar::MinnesotaHyper& h) {
  return {{"b_ar", h.b_ar},       {"lambda1", h.lambda1}, {"lambda2", h.lambda2}, {"lambda3", h.lambda3},
          {"lambda4", h.lambda4}, {"lags", h.lags},       {"trend", h.trend}};
}

bvar::MinnesotaHyper hyper_from(const json& j) {
  bvar::MinnesotaHyper h;
  h.b_ar = j.at("b_ar").get<double>();
  h.lambda1 = j.at("lambda1").get<double>();
  h.lambda2 = j.at("lambda2").get<double>();
  h.lambda3 = j.at("lambda3").get<double>();
  h.lambda4 = j.at("lambda4").get<double>();
  h.lags = j.at("lags").get<int>();
  h.trend = j.at("trend").get<bool>();
  return h;
}

std::string matrix_table(const std::string& corner, const std::vector<std::string>& rows,
                         const std::vector<std::string>& cols, const Eigen::MatrixXd& m) {
  std::string s = corner;
  for (const auto& c : cols) s += "," + c;
  s += "\n";
  for (Index r = 0; r < m.rows(); ++r) {
    s += rows[static_cast<std::size_t>(r)];
    for (Index c = 0; c < m.cols(); ++c) s += "," + fmt(m(r, c));
    s += "\n";
  }
  return s;
}

void run_estimate(const RunConfig& cfg, const fs::path& out) {
  const auto panel = read_panel(cfg, out);
  const auto names = panel.names();
  const Eigen::MatrixXd& data = panel.values();

  bvar::MinnesotaHyper hyper = cfg.hyper;
  hyper.lags = cfg.lags;
  hyper.trend = cfg.trend;
  std::string selected = "fixed";
  if (cfg.grid_search) {
    const auto grid = bvar::make_grid(cfg.grid_b_ar, cfg.grid_lambda1, cfg.grid_lambda2, cfg.grid_lambda3,
                                      cfg.grid_lambda4, cfg.lags, cfg.trend);
    const auto result = bvar::grid_search_hyper(grid, data);
    hyper = result.best;
    selected = "grid";
    std::string g = "b_ar,lambda1,lambda2,lambda3,lambda4,log_marginal\n";
    for (const auto& p : result.table) {
      g += fmt(p.hyper.b_ar) + "," + fmt(p.hyper.lambda1) + "," + fmt(p.hyper.lambda2) + "," + fmt(p.hyper.lambda3) +
           "," + fmt(p.hyper.lambda4) + "," + fmt(p.log_marginal) + "\n";
    }
    write_file(out / "grid.csv", g);
  }

  const auto post = bvar::fit(data, hyper);

  // DIC for the chosen model and the configured alternatives.
  std::vector<std::pair<int, bool>> models{{hyper.lags, hyper.trend}};
  for (int p : cfg.dic_lags) models.emplace_back(p, hyper.trend);
  if (cfg.dic_with_trend) models.emplace_back(hyper.lags, !hyper.trend);
  std::sort(models.begin() + 1, models.end());
  models.erase(std::unique(models.begin(), models.end()), models.end());

  std::string dic_csv = "lags,trend,dic,log_marginal,explosive_share\n";
  double chosen_explosive = 0.0;
  for (std::size_t k = 0; k < models.size(); ++k) {
    auto h = hyper;
    h.lags = models[k].first;
    h.trend = models[k].second;
    const auto p = k == 0 ? post : bvar::fit(data, h);
    const auto tag = "dic:" + std::to_string(h.lags) + (h.trend ? ":trend" : "");
    const auto draws = bvar::draw_posterior(p, cfg.draws, derive_seed(cfg.seed, tag));
    const double d = bvar::dic(draws, bvar::build_design(data, h.lags, h.trend), p.sigma_u);
    std::size_t explosive = 0;
    for (std::size_t i = 0; i < draws.size(); ++i) explosive += draws.stable(i) ? 0 : 1;
    const double share = static_cast<double>(explosive) / static_cast<double>(draws.size());
    if (k == 0) chosen_explosive = share;
    dic_csv += std::to_string(h.lags) + "," + (h.trend ? "true" : "false") + "," + fmt(d) + "," +
               fmt(p.log_marginal) + "," + fmt(share) + "\n";
  }
  write_file(out / "dic.csv", dic_csv);

  json model{{"hyper", hyper_json(hyper)},
             {"selected_by", selected},
             {"log_marginal", post.log_marginal},
             {"n_obs", post.n_obs},
             {"variables", names},
             {"start", format_year_month(panel.start())},
             {"end", format_year_month(panel.end())},
             {"explosive_share", chosen_explosive}};
  write_file(out / "model.json", model.dump(2) + "\n");

  write_file(out / "sigma_u.csv", matrix_table("variable", names, names, post.sigma_u));

  std::vector<std::string> regressors;
  for (int p = 1; p <= hyper.lags; ++p)
    for (const auto& n : names) regressors.push_back(n + ".L" + std::to_string(p));
  regressors.emplace_back("const");
  if (hyper.trend) regressors.emplace_back("trend");
  write_file(out / "coefficients.csv",
             matrix_table("regressor", regressors, names, bvar::coefficient_matrix(post.mean_coefficients())));
}

// ---- shared posterior for the analysis stages ------------------------------

struct Estimated {
  TimeSeriesPanel panel;
  Eigen::MatrixXd addback;
  bvar::BvarPosterior post;
  bvar::CoefficientDraws draws;
  Eigen::MatrixXd impact;
};

Estimated load_estimated(const RunConfig& cfg, const fs::path& out) {
  require(out, {"panel.csv", "seasonal.csv", "model.json"});
  auto panel = read_panel(cfg, out);
  const auto model = json::parse(read_file(out / "model.json"));
  if (model.at("variables").get<std::vector<std::string>>() != panel.names()) {
    throw DataError("model.json was estimated on different variables");
  }
  const auto hyper = hyper_from(model.at("hyper"));
  auto addback = read_seasonal(out / "seasonal.csv", panel.cols());
  auto post = bvar::fit(panel.values(), hyper);
  auto draws = bvar::draw_posterior(post, cfg.draws, derive_seed(cfg.seed, "posterior"));
  auto impact = svar::cholesky_identify(post.sigma_u);
  return {std::move(panel), std::move(addback), std::move(post), std::move(draws), std::move(impact)};
}

std::vector<double> column(const Eigen::MatrixXd& m, Index j) {
  return {m.col(j).data(), m.col(j).data() + m.rows()};
}

std::vector<double> horizons(int h) {
  std::vector<double> x;
  for (int i = 0; i <= h; ++i) x.push_back(i);
  return x;
}

// ---- irf ------------------------------------------------------------------

void run_irf(const RunConfig& cfg, const fs::path& out) {
  const auto est = load_estimated(cfg, out);
  const auto names = est.panel.names();
  const int H = cfg.irf_horizon;
  for (const auto& shock : irf_shocks(cfg)) {
    const auto r = irf::irf_bands(est.draws, est.post.sigma_u, cfg.index_of(shock), H, kBandProbs);
    std::string s = "shock,response,horizon,q05,q50,q95,mean,cum_q05,cum_q50,cum_q95,cum_mean\n";
    std::vector<svg::Chart> charts;
    for (Index j = 0; j < est.panel.cols(); ++j) {
      for (int h = 0; h <= H; ++h) {
        s += shock + "," + names[static_cast<std::size_t>(j)] + "," + std::to_string(h);
        for (const auto* b : {&r.bands, &r.cumulative_bands}) {
          for (double p : kBandProbs) s += "," + fmt(b->at(p)(h, j));
          s += "," + fmt(b->mean(h, j));
        }
        s += "\n";
      }
      svg::Chart c;
      c.title = shock + " -> " + names[static_cast<std::size_t>(j)];
      c.x = horizons(H);
      c.bands.push_back({column(r.bands.at(0.05), j), column(r.bands.at(0.95), j)});
      c.lines.push_back({column(r.bands.mean, j)});
      c.reference = 0.0;
      charts.push_back(std::move(c));
    }
    write_file(out / ("irf_" + file_token(shock) + ".csv"), s);
    write_file(out / ("irf_" + file_token(shock) + ".svg"), svg::render(charts, 4, "Responses to a " + shock + " shock"));
  }
}

// ---- decompose ------------------------------------------------------------

std::vector<int> decompose_responses(const RunConfig& cfg) {
  if (!cfg.decompose_response.empty()) return {cfg.index_of(cfg.decompose_response)};
  std::vector<int> all;
  for (int j = 0; j < static_cast<int>(cfg.variables.size()); ++j) all.push_back(j);
  return all;
}

void run_decompose(const RunConfig& cfg, const fs::path& out) {
  if (cfg.shut_sets.empty()) return;
  const auto est = load_estimated(cfg, out);
  const auto names = est.panel.names();
  const int shock = cfg.index_of(cfg.decompose_shock);
  const int H = std::max(cfg.irf_horizon, cfg.decompose_horizon);
  const auto responses = decompose_responses(cfg);

  std::string summary = "shock,shut_set,response,horizon,cum_baseline,cum_counterfactual,share\n";
  std::vector<svg::Chart> charts(responses.size());
  for (std::size_t k = 0; k < responses.size(); ++k) {
    charts[k].title = cfg.decompose_shock + " -> " + names[static_cast<std::size_t>(responses[k])];
    charts[k].x = horizons(H);
    charts[k].reference = 0.0;
  }

  for (std::size_t s = 0; s < cfg.shut_sets.size(); ++s) {
    const auto& set = cfg.shut_sets[s];
    const auto z = shut_indices(cfg, set);
    const auto b = tma::shutdown_bands(est.draws, est.post.sigma_u, shock, z, H, kBandProbs);
    std::string t =
        "shock,shut_set,response,horizon,baseline_q05,baseline_q50,baseline_q95,baseline_mean,"
        "counterfactual_q05,counterfactual_q50,counterfactual_q95,counterfactual_mean,cum_baseline_mean,"
        "cum_counterfactual_mean\n";
    for (Index j = 0; j < est.panel.cols(); ++j) {
      for (int h = 0; h <= H; ++h) {
        t += cfg.decompose_shock + "," + set.label() + "," + names[static_cast<std::size_t>(j)] + "," +
             std::to_string(h);
        for (double p : kBandProbs) t += "," + fmt(b.baseline.at(p)(h, j));
        t += "," + fmt(b.baseline.mean(h, j));
        for (double p : kBandProbs) t += "," + fmt(b.counterfactual.at(p)(h, j));
        t += "," + fmt(b.counterfactual.mean(h, j)) + "," + fmt(b.cumulative_baseline.mean(h, j)) + "," +
             fmt(b.cumulative_counterfactual.mean(h, j)) + "\n";
      }
    }
    write_file(out / ("tma_" + file_token(cfg.decompose_shock) + "_" + file_token(set.label()) + ".csv"), t);

    for (std::size_t k = 0; k < responses.size(); ++k) {
      const int j = responses[k];
      const int h = cfg.decompose_horizon;
      const double cb = b.cumulative_baseline.mean(h, j), cc = b.cumulative_counterfactual.mean(h, j);
      const auto share = tma::amplification_share(cb, cc);
      summary += cfg.decompose_shock + "," + set.label() + "," + names[static_cast<std::size_t>(j)] + "," +
                 std::to_string(h) + "," + fmt(cb) + "," + fmt(cc) + "," + (share ? fmt(*share) : "NA") + "\n";
      if (s == 0) {
        charts[k].bands.push_back({column(b.baseline.at(0.05), j), column(b.baseline.at(0.95), j)});
        charts[k].lines.push_back({column(b.baseline.mean, j)});
      }
      charts[k].lines.push_back({column(b.counterfactual.mean, j), kPalette[s % std::size(kPalette)], true});
    }
  }
  write_file(out / "tma_summary.csv", summary);
  write_file(out / ("tma_" + file_token(cfg.decompose_shock) + ".svg"),
             svg::render(charts, 4, "Shutdown responses to a " + cfg.decompose_shock + " shock"));
}

// ---- forecast and condition -------------------------------------------------

scenario::ForecastSetup forecast_setup(const RunConfig& cfg, const TimeSeriesPanel& panel, const std::string& tag) {
  scenario::ForecastSetup s;
  s.history = panel.values();
  s.first_date = panel.end().plus_months(1);
  s.horizon = cfg.forecast_horizon;
  s.trend_index = static_cast<double>(panel.rows());
  s.shock_mode = cfg.shock_mode;
  s.seed = derive_seed(cfg.seed, tag);
  s.record_shocks = false;
  return s;
}

std::string fan_table(const scenario::ScenarioResult& r, const std::vector<std::string>& names) {
  const auto b = r.fan(kFanProbs);
  std::string s = "date,variable,q05,q25,q50,q75,q95,mean\n";
  for (Index j = 0; j < b.mean.cols(); ++j) {
    for (Index h = 0; h < b.mean.rows(); ++h) {
      s += format_year_month(r.first_date.plus_months(h)) + "," + names[static_cast<std::size_t>(j)];
      for (double p : kFanProbs) s += "," + fmt(b.at(p)(h, j));
      s += "," + fmt(b.mean(h, j)) + "\n";
    }
  }
  return s;
}

const char* kCrossingHeader = "scenario,variable,threshold,month,offset,share_never,q05,q50,q95\n";

std::string crossing_rows(const RunConfig& cfg, const std::string& label, const scenario::ScenarioResult& r,
                          const Eigen::MatrixXd& addback) {
  if (cfg.crossing_variable.empty()) return {};
  const int j = cfg.index_of(cfg.crossing_variable);
  std::string s;
  for (double threshold : cfg.thresholds) {
    scenario::CrossingQuery q;
    q.variable = j;
    q.threshold = threshold;
    q.month = cfg.crossing_month;
    q.offset = cfg.crossing_month ? addback(*cfg.crossing_month - 1, j) : 0.0;
    const auto c = scenario::first_crossing(r, q, kBandProbs);
    s += label + "," + cfg.crossing_variable + "," + fmt(threshold) + "," +
         (cfg.crossing_month ? std::to_string(*cfg.crossing_month) : "any") + "," + fmt(q.offset) + "," +
         fmt(c.share_never);
    for (std::size_t k = 0; k < c.probs.size(); ++k) {
      double q = c.quantile_index[k];
      if (!std::isfinite(q)) {
        s += ",never";
        continue;
      }
      if (cfg.crossing_month) {
        // Interpolating between two crossings in the filtered month lands on
        // other months; snap to the nearest filtered month instead.
        const double base = ((*cfg.crossing_month - r.first_date.month) % 12 + 12) % 12;
        q = base + 12.0 * std::round((q - base) / 12.0);
      }
      s += "," + format_year_month(r.first_date.plus_months(std::lround(q)));
    }
    s += "\n";
  }
  return s;
}

// History, fan and optional extra line for one variable on a decimal-year axis.
svg::Chart fan_chart(const std::string& title, const TimeSeriesPanel& panel, const scenario::ScenarioResult& r,
                     Index j, int history_months) {
  const auto b = r.fan(kFanProbs);
  svg::Chart c;
  c.title = title;
  const Index h0 = std::max<Index>(0, panel.rows() - history_months);
  const Index n_hist = panel.rows() - h0, n = n_hist + b.mean.rows();
  std::vector<double> hist(static_cast<std::size_t>(n), NAN), lo(hist), hi(hist), mid(hist);
  for (Index t = h0; t < panel.rows(); ++t) {
    c.x.push_back(decimal_year(panel.date(t)));
    hist[static_cast<std::size_t>(t - h0)] = panel.values()(t, j);
  }
  for (Index h = 0; h < b.mean.rows(); ++h) {
    c.x.push_back(decimal_year(r.first_date.plus_months(h)));
    const auto k = static_cast<std::size_t>(n_hist + h);
    lo[k] = b.at(0.05)(h, j), hi[k] = b.at(0.95)(h, j), mid[k] = b.at(0.5)(h, j);
  }
  c.bands.push_back({lo, hi});
  c.lines.push_back({hist});
  c.lines.push_back({mid, kPalette[0]});
  return c;
}

void run_forecast(const RunConfig& cfg, const fs::path& out) {
  const auto est = load_estimated(cfg, out);
  const auto names = est.panel.names();
  const auto setup = forecast_setup(cfg, est.panel, "forecast");
  const auto r = scenario::unconditional_forecast(est.draws, est.impact, setup);
  write_file(out / "forecast_fan.csv", fan_table(r, names));
  write_file(out / "crossing.csv", kCrossingHeader + crossing_rows(cfg, "unconditional", r, est.addback));

  const Index span = est.panel.rows() + cfg.forecast_horizon;
  const auto det = scenario::deterministic_component(est.draws, est.panel.values(), span);
  std::string d = "date";
  for (const auto& n : names) d += "," + n;
  d += "\n";
  for (Index t = 0; t < det.rows(); ++t) {
    d += format_year_month(est.panel.date(t));
    for (Index j = 0; j < det.cols(); ++j) d += "," + fmt(det(t, j));
    d += "\n";
  }
  write_file(out / "deterministic.csv", d);

  std::vector<svg::Chart> charts;
  for (Index j = 0; j < est.panel.cols(); ++j) {
    auto c = fan_chart(names[static_cast<std::size_t>(j)], est.panel, r, j, 240);
    if (names[static_cast<std::size_t>(j)] == cfg.crossing_variable && !cfg.thresholds.empty()) {
      c.reference = cfg.thresholds.front() - (cfg.crossing_month ? est.addback(*cfg.crossing_month - 1, j) : 0.0);
    }
    charts.push_back(std::move(c));
  }
  write_file(out / "forecast.svg", svg::render(charts, 4, "Unconditional forecast"));
}

void run_condition(const RunConfig& cfg, const fs::path& out) {
  if (cfg.scenarios.empty()) return;
  const auto est = load_estimated(cfg, out);
  const auto names = est.panel.names();
  const auto last = est.panel.values().row(est.panel.rows() - 1);
  std::string crossing = kCrossingHeader;
  std::vector<svg::Chart> charts;

  for (const auto& sc : cfg.scenarios) {
    std::ifstream in(sc.file);
    if (!in) throw DataError("cannot open scenario file " + sc.file.string());
    const auto points = scenario::load_scenario(in);
    const auto setup = forecast_setup(cfg, est.panel, "condition:" + sc.name);
    const int v = cfg.index_of(sc.variable);
    // Scenario values are in raw units; move them onto the deseasonalized scale.
    Eigen::VectorXd targets = scenario::scenario_targets(points, setup.first_date, setup.horizon);
    for (Index h = 0; h < targets.size(); ++h) targets(h) -= est.addback(setup.first_date.plus_months(h).month - 1, v);
    const std::vector<scenario::ConditionPath> conditions{{v, targets}};

    const auto r = scenario::conditional_forecast(est.draws, est.impact, setup, conditions);
    write_file(out / ("condition_" + file_token(sc.name) + "_fan.csv"), fan_table(r, names));
    crossing += crossing_rows(cfg, sc.name, r, est.addback);
    const Index focus = cfg.crossing_variable.empty() ? v : cfg.index_of(cfg.crossing_variable);
    charts.push_back(fan_chart(sc.name + ": " + sc.variable, est.panel, r, v, 240));
    auto fc = fan_chart(sc.name + ": " + names[static_cast<std::size_t>(focus)], est.panel, r, focus, 240);

    if (!cfg.freeze.empty()) {
      std::vector<scenario::FrozenLevel> frozen;
      for (const auto& f : cfg.freeze) {
        const int k = cfg.index_of(f);
        frozen.push_back({k, last(k)});
      }
      const auto rf = scenario::frozen_channel_forecast(est.draws, est.impact, setup, conditions, frozen);
      write_file(out / ("condition_" + file_token(sc.name) + "_frozen_fan.csv"), fan_table(rf, names));
      crossing += crossing_rows(cfg, sc.name + "|frozen", rf, est.addback);
      const auto bf = rf.fan(kFanProbs);
      std::vector<double> line(fc.x.size(), NAN);
      const std::size_t off = fc.x.size() - static_cast<std::size_t>(bf.mean.rows());
      for (Index h = 0; h < bf.mean.rows(); ++h) line[off + static_cast<std::size_t>(h)] = bf.at(0.5)(h, focus);
      fc.lines.push_back({line, kPalette[1], true});
    }
    charts.push_back(std::move(fc));
  }
  write_file(out / "condition_crossing.csv", crossing);
  write_file(out / "condition.svg", svg::render(charts, 2, "Conditional forecasts"));
}

// ---- report ---------------------------------------------------------------

std::vector<std::string> upstream_outputs(const RunConfig& cfg) {
  std::vector<std::string> all;
  for (Stage s : kAllStages) {
    if (s == Stage::report) continue;
    for (auto& n : stage_outputs(s, cfg)) all.push_back(std::move(n));
  }
  return all;
}

void run_report(const RunConfig& cfg, const fs::path& out) {
  const auto inputs = upstream_outputs(cfg);
  require(out, inputs);

  const auto model = json::parse(read_file(out / "model.json"));
  const auto& h = model.at("hyper");
  std::ostringstream md;
  md << "# svarkit run report\n\n";
  md << "## Model\n\n";
  md << "- variables (causal order): ";
  const auto vars = model.at("variables").get<std::vector<std::string>>();
  for (std::size_t i = 0; i < vars.size(); ++i) md << (i ? ", " : "") << vars[i];
  md << "\n- sample: " << model.at("start").get<std::string>() << " to " << model.at("end").get<std::string>()
     << " (" << model.at("n_obs").get<long>() << " effective observations)\n";
  md << "- deseasonalization: " << to_string(cfg.deseason) << "\n";
  md << "- lags: " << h.at("lags").get<int>() << ", trend: " << (h.at("trend").get<bool>() ? "yes" : "no") << "\n";
  md << "- hyperparameters (" << model.at("selected_by").get<std::string>()
     << "): b_ar=" << fmt(h.at("b_ar").get<double>()) << ", lambda1=" << fmt(h.at("lambda1").get<double>())
     << ", lambda2=" << fmt(h.at("lambda2").get<double>()) << ", lambda3=" << fmt(h.at("lambda3").get<double>())
     << ", lambda4=" << fmt(h.at("lambda4").get<double>()) << "\n";
  md << "- log marginal likelihood: " << fmt(model.at("log_marginal").get<double>()) << "\n";
  md << "- posterior draws: " << cfg.draws << " (explosive share "
     << fmt(model.at("explosive_share").get<double>()) << "), seed " << cfg.seed << "\n\n";
  md << "## Deviance information criterion\n\n" << markdown(read_table(out / "dic.csv")) << "\n";
  if (!cfg.crossing_variable.empty() && !cfg.thresholds.empty()) {
    md << "## First crossing dates\n\n" << markdown(read_table(out / "crossing.csv")) << "\n";
    if (!cfg.scenarios.empty()) md << markdown(read_table(out / "condition_crossing.csv")) << "\n";
  }
  if (!cfg.shut_sets.empty()) {
    md << "## Channel shutdowns\n\n" << markdown(read_table(out / "tma_summary.csv")) << "\n";
  }
  md << "## Artifacts\n\n";
  for (const auto& n : inputs) md << "- " << n << "\n";
  write_file(out / "report.md", md.str());

  json outputs = json::object();
  for (const auto& n : inputs) outputs[n] = sha256_file(out / n);
  outputs["report.md"] = sha256_file(out / "report.md");
  json streams = json::object();
  streams["posterior"] = derive_seed(cfg.seed, "posterior");
  streams["forecast"] = derive_seed(cfg.seed, "forecast");
  for (const auto& sc : cfg.scenarios) streams["condition:" + sc.name] = derive_seed(cfg.seed, "condition:" + sc.name);
  json scenario_hashes = json::object();
  for (const auto& sc : cfg.scenarios) scenario_hashes[sc.name] = sha256_file(sc.file);

  json manifest{{"tool", "svarkit"},
                {"version", SVARKIT_VERSION},
                {"config_sha256", sha256_hex(render_config(cfg))},
                {"data_sha256", sha256_file(cfg.data)},
                {"scenario_sha256", scenario_hashes},
                {"seed", cfg.seed},
                {"stream_seeds", streams},
                {"build",
                 {{"compiler", __VERSION__},
                  {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                std::to_string(EIGEN_MINOR_VERSION)},
                  {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                        std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                        std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}},
                {"outputs", outputs}};
  write_file(out / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::deseason: return "deseason";
    case Stage::estimate: return "estimate";
    case Stage::irf: return "irf";
    case Stage::decompose: return "decompose";
    case Stage::forecast: return "forecast";
    case Stage::condition: return "condition";
    case Stage::report: return "report";
  }
  return "unknown";
}

Stage parse_stage(std::string_view name) {
  for (Stage s : kAllStages) {
    if (stage_name(s) == name) return s;
  }
  throw ConfigError("unknown stage '" + std::string(name) + "'");
}

std::vector<std::string> stage_outputs(Stage stage, const RunConfig& cfg) {
  std::vector<std::string> out;
  switch (stage) {
    case Stage::deseason:
      out = {"panel.csv", "seasonal.csv"};
      if (is_bsm(cfg)) {
        out.emplace_back("bsm_params.csv");
        for (const auto& n : bsm_variables(cfg)) out.push_back("bsm_" + file_token(n) + ".csv");
      }
      break;
    case Stage::estimate:
      out = {"model.json", "sigma_u.csv", "coefficients.csv", "dic.csv"};
      if (cfg.grid_search) out.emplace_back("grid.csv");
      break;
    case Stage::irf:
      for (const auto& s : irf_shocks(cfg)) {
        out.push_back("irf_" + file_token(s) + ".csv");
        out.push_back("irf_" + file_token(s) + ".svg");
      }
      break;
    case Stage::decompose:
      if (!cfg.shut_sets.empty()) {
        for (const auto& s : cfg.shut_sets) {
          out.push_back("tma_" + file_token(cfg.decompose_shock) + "_" + file_token(s.label()) + ".csv");
        }
        out.emplace_back("tma_summary.csv");
        out.push_back("tma_" + file_token(cfg.decompose_shock) + ".svg");
      }
      break;
    case Stage::forecast:
      out = {"forecast_fan.csv", "crossing.csv", "deterministic.csv", "forecast.svg"};
      break;
    case Stage::condition:
      for (const auto& s : cfg.scenarios) {
        out.push_back("condition_" + file_token(s.name) + "_fan.csv");
        if (!cfg.freeze.empty()) out.push_back("condition_" + file_token(s.name) + "_frozen_fan.csv");
      }
      if (!cfg.scenarios.empty()) {
        out.emplace_back("condition_crossing.csv");
        out.emplace_back("condition.svg");
      }
      break;
    case Stage::report:
      out = {"report.md", "manifest.json"};
      break;
  }
  return out;
}

std::vector<std::string> stage_inputs(Stage stage, const RunConfig& cfg) {
  switch (stage) {
    case Stage::deseason: return {};
    case Stage::estimate: return {"panel.csv"};
    case Stage::report: return upstream_outputs(cfg);
    default: return {"panel.csv", "seasonal.csv", "model.json"};
  }
}

void run_stage(Stage stage, const RunConfig& cfg, const fs::path& out) {
  fs::create_directories(out);
  require(out, stage_inputs(stage, cfg));
  switch (stage) {
    case Stage::deseason: run_deseason(cfg, out); break;
    case Stage::estimate: run_estimate(cfg, out); break;
    case Stage::irf: run_irf(cfg, out); break;
    case Stage::decompose: run_decompose(cfg, out); break;
    case Stage::forecast: run_forecast(cfg, out); break;
    case Stage::condition: run_condition(cfg, out); break;
    case Stage::report: run_report(cfg, out); break;
  }
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) {
  // FNV-1a over the tag, folded into the master seed with a splitmix64 finalizer.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) h = (h ^ c) * 0x100000001b3ULL;
  std::uint64_t z = master ^ h;
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_file(path)); }

int exit_code(const std::exception_ptr& error) {
  try {
    std::rethrow_exception(error);
  } catch (const ConfigError&) {
    return 2;
  } catch (const MissingArtifact&) {
    return 2;
  } catch (const DataError&) {
    return 2;
  } catch (const NumericalError&) {
    return 3;
  } catch (...) {
    return 1;
  }
}

std::string file_token(std::string_view name) {
  std::string s;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                    c == '_' || c == '+' || c == '.';
    s += ok ? c : '_';
  }
  return s;
}

}  // namespace svarkit::app
