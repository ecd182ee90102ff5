#include "svarkit/app/config.hpp"
#include "svarkit/app/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kOk = 0, kConfig = 2;

std::string message(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const std::exception& ex) {
    return ex.what();
  } catch (...) {
    return "unknown error";
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace svarkit::app;

  CLI::App app{"svarkit: Bayesian structural VAR pipeline"};
  std::string config_path, out_dir = "svarkit-out", stage_opt, command;
  std::optional<std::uint64_t> seed;
  app.add_option("command", command, "Stage to run: deseason, estimate, irf, decompose, forecast, condition, report, run");
  app.add_option("--config,-c", config_path, "Run configuration file")->required();
  app.add_option("--seed,-s", seed, "Master seed (overrides the config file)");
  app.add_option("--out,-o", out_dir, "Output directory")->capture_default_str();
  app.add_option("--stage", stage_opt, "Same as the positional stage argument");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  if (!command.empty() && !stage_opt.empty() && command != stage_opt) {
    std::cerr << "error [config]: stage given twice ('" << command << "' and '" << stage_opt << "')\n";
    return kConfig;
  }
  const std::string which = !command.empty() ? command : (!stage_opt.empty() ? stage_opt : "run");

  RunConfig config;
  std::vector<Stage> stages;
  try {
    config = load_config(config_path, seed);
    if (which == "run") {
      stages.assign(kAllStages.begin(), kAllStages.end());
    } else {
      stages.push_back(parse_stage(which));
    }
  } catch (...) {
    const auto e = std::current_exception();
    std::cerr << "error [config]: " << message(e) << "\n";
    return exit_code(e);
  }

  for (Stage s : stages) {
    try {
      run_stage(s, config, out_dir);
      std::cerr << "[" << stage_name(s) << "] done\n";
    } catch (...) {
      const auto e = std::current_exception();
      std::cerr << "error [" << stage_name(s) << "]: " << message(e) << "\n";
      return exit_code(e);
    }
  }
  return kOk;
}
