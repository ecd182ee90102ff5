#pragma once

#include "svarkit/bvar.hpp"
#include "svarkit/calendar.hpp"
#include "svarkit/error.hpp"
#include "svarkit/panel.hpp"
#include "svarkit/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace svarkit::app {

/// Invalid or incomplete run configuration (exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A required upstream artifact is absent (exit code 2).
class MissingArtifact : public Error {
 public:
  explicit MissingArtifact(std::vector<std::string> names);
  [[nodiscard]] const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
};

struct ScenarioSpec {
  std::string name;
  std::string variable;
  std::filesystem::path file;
};

struct ShutSpec {
  std::vector<std::string> variables;
  [[nodiscard]] std::string label() const;  // names joined with '+'
};

struct RunConfig {
  std::filesystem::path source;  // config file, for relative paths and hashing
  std::filesystem::path data;
  std::vector<VariableSpec> variables;
  std::optional<YearMonth> first;
  std::optional<YearMonth> last;

  SeasonalMethod deseason = SeasonalMethod::dummy;
  std::vector<std::string> deseason_skip;
  int synthetic_month = 9;

  int lags = 12;
  bool trend = false;
  bool grid_search = false;
  bvar::MinnesotaHyper hyper;  // used when grid_search is false
  std::vector<double> grid_b_ar{0.5, 0.8, 0.9, 1.0};
  std::vector<double> grid_lambda1{0.05, 0.1, 0.2, 0.3, 0.5, 1.0};
  std::vector<double> grid_lambda2{0.5};
  std::vector<double> grid_lambda3{1.0, 1.5, 2.0};
  std::vector<double> grid_lambda4{100.0};
  std::vector<int> dic_lags;        // extra lag orders scored by DIC
  bool dic_with_trend = false;      // also score the chosen lag order with a trend

  int draws = 2000;
  std::uint64_t seed = 0;

  int irf_horizon = 60;
  std::vector<std::string> shocks;
  std::string decompose_shock;
  std::string decompose_response;
  int decompose_horizon = 36;
  std::vector<ShutSpec> shut_sets;

  int forecast_horizon = 120;
  scenario::ShockMode shock_mode = scenario::ShockMode::zero;
  std::string crossing_variable;
  std::vector<double> thresholds;
  std::optional<int> crossing_month = 9;
  std::vector<ScenarioSpec> scenarios;
  std::vector<std::string> freeze;

  /// Column index of a configured variable; throws ConfigError if unknown.
  [[nodiscard]] int index_of(const std::string& name) const;
};

/// Parses `key = value` lines ('#' starts a comment). Relative paths resolve
/// against the config file's directory. `seed` is mandatory unless
/// `seed_override` is given, which also wins over the file's value.
RunConfig parse_config(std::istream& in, const std::filesystem::path& source,
                       std::optional<std::uint64_t> seed_override = {});
RunConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override = {});

/// Canonical key=value rendering (defaults included), used for hashing.
std::string render_config(const RunConfig& config);

}  // namespace svarkit::app
