#include "svarkit/app/config.hpp"

#include "svarkit/text_io.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace svarkit::app {

namespace {

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

std::vector<std::string> list(const std::string& value, char sep = ',') {
  std::vector<std::string> out;
  if (io::trim(value).empty()) return out;
  for (const auto& item : io::split(value, sep)) {
    const auto t = io::trim(item);
    if (t.empty()) throw ConfigError("empty item in list '" + value + "'");
    out.emplace_back(t);
  }
  return out;
}

double number(const std::string& key, const std::string& value) {
  try {
    return io::parse_double(value);
  } catch (const DataError&) {
    throw ConfigError(key + ": '" + value + "' is not a number");
  }
}

int integer(const std::string& key, const std::string& value, int min_value) {
  const double v = number(key, value);
  if (v != static_cast<double>(static_cast<long long>(v)) || v < min_value || v > 1e9) {
    throw ConfigError(key + ": expected an integer >= " + std::to_string(min_value));
  }
  return static_cast<int>(v);
}

std::vector<double> numbers(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const auto& item : list(value)) out.push_back(number(key, item));
  if (out.empty()) throw ConfigError(key + ": expected at least one value");
  return out;
}

bool boolean(const std::string& key, const std::string& value) {
  if (value == "true" || value == "yes" || value == "1") return true;
  if (value == "false" || value == "no" || value == "0") return false;
  throw ConfigError(key + ": expected true or false");
}

YearMonth month_value(const std::string& key, const std::string& value) {
  try {
    return parse_year_month(value);
  } catch (const DataError&) {
    throw ConfigError(key + ": expected YYYY-MM, got '" + value + "'");
  }
}

std::string fmt_list(const std::vector<double>& v) {
  std::vector<std::string> s;
  for (double x : v) s.push_back(io::format_double(x));
  return join(s, ",");
}

}  // namespace

MissingArtifact::MissingArtifact(std::vector<std::string> names)
    : Error("missing artifacts: " + join(names, ", ")), names_(std::move(names)) {}

std::string ShutSpec::label() const { return join(variables, "+"); }

int RunConfig::index_of(const std::string& name) const {
  for (const auto& v : variables) {
    if (v.name == name) return v.ordering_index;
  }
  throw ConfigError("unknown variable '" + name + "'");
}

RunConfig parse_config(std::istream& in, const std::filesystem::path& source,
                       std::optional<std::uint64_t> seed_override) {
  RunConfig cfg;
  cfg.source = source;
  const auto base = source.has_parent_path() ? source.parent_path() : std::filesystem::path(".");
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : (base / path).lexically_normal();
  };

  bool have_seed = false, have_data = false;
  std::set<std::string> seen;
  const std::map<std::string, std::function<void(const std::string&, const std::string&)>> handlers{
      {"data", [&](auto&, auto& v) { cfg.data = resolve(v), have_data = true; }},
      {"variables",
       [&](auto&, auto& v) {
         for (const auto& item : list(v)) {
           const auto colon = item.find(':');
           VariableSpec spec{std::string(io::trim(item.substr(0, colon))),
                             colon == std::string::npos ? "" : std::string(io::trim(item.substr(colon + 1))),
                             static_cast<int>(cfg.variables.size())};
           cfg.variables.push_back(spec);
         }
       }},
      {"start", [&](auto& k, auto& v) { cfg.first = month_value(k, v); }},
      {"end", [&](auto& k, auto& v) { cfg.last = month_value(k, v); }},
      {"deseason",
       [&](auto& k, auto& v) {
         try {
           cfg.deseason = parse_seasonal_method(v);
         } catch (const DataError&) {
           throw ConfigError(k + ": expected dummy, bsm-static or bsm-evolving");
         }
       }},
      {"deseason_skip", [&](auto&, auto& v) { cfg.deseason_skip = list(v); }},
      {"synthetic_month",
       [&](auto& k, auto& v) {
         cfg.synthetic_month = integer(k, v, 1);
         if (cfg.synthetic_month > 12) throw ConfigError(k + ": month must be 1..12");
       }},
      {"lags", [&](auto& k, auto& v) { cfg.lags = cfg.hyper.lags = integer(k, v, 1); }},
      {"trend", [&](auto& k, auto& v) { cfg.trend = cfg.hyper.trend = boolean(k, v); }},
      {"hyper",
       [&](auto& k, auto& v) {
         const auto h = numbers(k, v);
         if (h.size() != 5) throw ConfigError(k + ": expected b_ar,lambda1,lambda2,lambda3,lambda4");
         cfg.hyper.b_ar = h[0], cfg.hyper.lambda1 = h[1], cfg.hyper.lambda2 = h[2], cfg.hyper.lambda3 = h[3],
         cfg.hyper.lambda4 = h[4];
       }},
      {"grid_search", [&](auto& k, auto& v) { cfg.grid_search = boolean(k, v); }},
      {"grid_b_ar", [&](auto& k, auto& v) { cfg.grid_b_ar = numbers(k, v); }},
      {"grid_lambda1", [&](auto& k, auto& v) { cfg.grid_lambda1 = numbers(k, v); }},
      {"grid_lambda2", [&](auto& k, auto& v) { cfg.grid_lambda2 = numbers(k, v); }},
      {"grid_lambda3", [&](auto& k, auto& v) { cfg.grid_lambda3 = numbers(k, v); }},
      {"grid_lambda4", [&](auto& k, auto& v) { cfg.grid_lambda4 = numbers(k, v); }},
      {"dic_lags",
       [&](auto& k, auto& v) {
         for (double x : numbers(k, v)) cfg.dic_lags.push_back(integer(k, io::format_double(x), 1));
       }},
      {"dic_trend", [&](auto& k, auto& v) { cfg.dic_with_trend = boolean(k, v); }},
      {"draws", [&](auto& k, auto& v) { cfg.draws = integer(k, v, 1); }},
      {"seed",
       [&](auto& k, auto& v) {
         const double s = number(k, v);
         if (s < 0 || s != static_cast<double>(static_cast<std::uint64_t>(s))) {
           throw ConfigError(k + ": expected a non-negative integer");
         }
         cfg.seed = static_cast<std::uint64_t>(s);
         have_seed = true;
       }},
      {"irf_horizon", [&](auto& k, auto& v) { cfg.irf_horizon = integer(k, v, 0); }},
      {"shocks", [&](auto&, auto& v) { cfg.shocks = list(v); }},
      {"decompose_shock", [&](auto&, auto& v) { cfg.decompose_shock = v; }},
      {"decompose_response", [&](auto&, auto& v) { cfg.decompose_response = v; }},
      {"decompose_horizon", [&](auto& k, auto& v) { cfg.decompose_horizon = integer(k, v, 0); }},
      {"shut_sets",
       [&](auto&, auto& v) {
         for (const auto& set : list(v, ';')) cfg.shut_sets.push_back({list(set, '+')});
       }},
      {"forecast_horizon", [&](auto& k, auto& v) { cfg.forecast_horizon = integer(k, v, 1); }},
      {"shock_mode",
       [&](auto& k, auto& v) {
         if (v == "zero") {
           cfg.shock_mode = scenario::ShockMode::zero;
         } else if (v == "sampled") {
           cfg.shock_mode = scenario::ShockMode::sampled;
         } else {
           throw ConfigError(k + ": expected zero or sampled");
         }
       }},
      {"crossing_variable", [&](auto&, auto& v) { cfg.crossing_variable = v; }},
      {"thresholds", [&](auto& k, auto& v) { cfg.thresholds = numbers(k, v); }},
      {"crossing_month",
       [&](auto& k, auto& v) {
         if (v == "any") {
           cfg.crossing_month.reset();
         } else {
           cfg.crossing_month = integer(k, v, 1);
           if (*cfg.crossing_month > 12) throw ConfigError(k + ": month must be 1..12 or 'any'");
         }
       }},
      {"scenarios",
       [&](auto& k, auto& v) {
         for (const auto& item : list(v)) {
           const auto parts = list(item, ':');
           if (parts.size() != 3) throw ConfigError(k + ": expected name:variable:file, got '" + item + "'");
           cfg.scenarios.push_back({parts[0], parts[1], resolve(parts[2])});
         }
       }},
      {"freeze", [&](auto&, auto& v) { cfg.freeze = list(v); }},
  };

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto text = io::trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(io::trim(text.substr(0, eq)));
    const std::string value(io::trim(text.substr(eq + 1)));
    const auto it = handlers.find(key);
    if (it == handlers.end()) throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    it->second(key, value);
  }

  if (seed_override) cfg.seed = *seed_override, have_seed = true;
  if (!have_seed) throw ConfigError("seed is mandatory");
  if (!have_data) throw ConfigError("data is mandatory");
  if (cfg.variables.empty()) throw ConfigError("variables is mandatory");
  std::set<std::string> names;
  for (const auto& v : cfg.variables) {
    if (v.name.empty() || !names.insert(v.name).second) throw ConfigError("variable names must be unique and non-empty");
  }
  try {
    cfg.hyper.validate();
  } catch (const DataError& e) {
    throw ConfigError(std::string("hyper: ") + e.what());
  }
  if (cfg.first && cfg.last && *cfg.last < *cfg.first) throw ConfigError("end is before start");

  for (const auto& n : cfg.deseason_skip) (void)cfg.index_of(n);
  for (const auto& n : cfg.shocks) (void)cfg.index_of(n);
  for (const auto& n : cfg.freeze) (void)cfg.index_of(n);
  for (const auto& s : cfg.shut_sets)
    for (const auto& n : s.variables) (void)cfg.index_of(n);
  if (!cfg.shut_sets.empty() && cfg.decompose_shock.empty()) {
    throw ConfigError("shut_sets needs decompose_shock");
  }
  if (!cfg.decompose_shock.empty()) {
    const int j = cfg.index_of(cfg.decompose_shock);
    for (const auto& s : cfg.shut_sets)
      for (const auto& n : s.variables)
        if (cfg.index_of(n) == j) throw ConfigError("shut set '" + s.label() + "' contains the decomposed shock");
  }
  if (!cfg.decompose_response.empty()) (void)cfg.index_of(cfg.decompose_response);
  if (!cfg.crossing_variable.empty()) (void)cfg.index_of(cfg.crossing_variable);
  if (!cfg.thresholds.empty() && cfg.crossing_variable.empty()) {
    throw ConfigError("thresholds need crossing_variable");
  }
  for (const auto& s : cfg.scenarios) {
    (void)cfg.index_of(s.variable);
    if (std::find(cfg.freeze.begin(), cfg.freeze.end(), s.variable) != cfg.freeze.end()) {
      throw ConfigError("variable '" + s.variable + "' is both frozen and scenario-conditioned");
    }
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in, path, seed_override);
}

std::string render_config(const RunConfig& c) {
  std::ostringstream o;
  std::vector<std::string> vars;
  for (const auto& v : c.variables) vars.push_back(v.units.empty() ? v.name : v.name + ":" + v.units);
  o << "data = " << c.data.generic_string() << "\n";
  o << "variables = " << join(vars, ",") << "\n";
  if (c.first) o << "start = " << format_year_month(*c.first) << "\n";
  if (c.last) o << "end = " << format_year_month(*c.last) << "\n";
  o << "deseason = " << to_string(c.deseason) << "\n";
  o << "deseason_skip = " << join(c.deseason_skip, ",") << "\n";
  o << "synthetic_month = " << c.synthetic_month << "\n";
  o << "lags = " << c.lags << "\n";
  o << "trend = " << (c.trend ? "true" : "false") << "\n";
  o << "hyper = " << fmt_list({c.hyper.b_ar, c.hyper.lambda1, c.hyper.lambda2, c.hyper.lambda3, c.hyper.lambda4})
    << "\n";
  o << "grid_search = " << (c.grid_search ? "true" : "false") << "\n";
  o << "grid_b_ar = " << fmt_list(c.grid_b_ar) << "\n";
  o << "grid_lambda1 = " << fmt_list(c.grid_lambda1) << "\n";
  o << "grid_lambda2 = " << fmt_list(c.grid_lambda2) << "\n";
  o << "grid_lambda3 = " << fmt_list(c.grid_lambda3) << "\n";
  o << "grid_lambda4 = " << fmt_list(c.grid_lambda4) << "\n";
  std::vector<std::string> dl;
  for (int l : c.dic_lags) dl.push_back(std::to_string(l));
  o << "dic_lags = " << join(dl, ",") << "\n";
  o << "dic_trend = " << (c.dic_with_trend ? "true" : "false") << "\n";
  o << "draws = " << c.draws << "\n";
  o << "seed = " << c.seed << "\n";
  o << "irf_horizon = " << c.irf_horizon << "\n";
  o << "shocks = " << join(c.shocks, ",") << "\n";
  o << "decompose_shock = " << c.decompose_shock << "\n";
  o << "decompose_response = " << c.decompose_response << "\n";
  o << "decompose_horizon = " << c.decompose_horizon << "\n";
  std::vector<std::string> sets;
  for (const auto& s : c.shut_sets) sets.push_back(s.label());
  o << "shut_sets = " << join(sets, ";") << "\n";
  o << "forecast_horizon = " << c.forecast_horizon << "\n";
  o << "shock_mode = " << (c.shock_mode == scenario::ShockMode::zero ? "zero" : "sampled") << "\n";
  o << "crossing_variable = " << c.crossing_variable << "\n";
  o << "thresholds = " << fmt_list(c.thresholds) << "\n";
  o << "crossing_month = " << (c.crossing_month ? std::to_string(*c.crossing_month) : "any") << "\n";
  std::vector<std::string> sc;
  for (const auto& s : c.scenarios) sc.push_back(s.name + ":" + s.variable + ":" + s.file.generic_string());
  o << "scenarios = " << join(sc, ",") << "\n";
  o << "freeze = " << join(c.freeze, ",") << "\n";
  return o.str();
}

}  // namespace svarkit::app
