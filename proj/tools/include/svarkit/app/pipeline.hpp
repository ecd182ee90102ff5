#pragma once

#include "svarkit/app/config.hpp"

#include <array>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace svarkit::app {

enum class Stage { deseason, estimate, irf, decompose, forecast, condition, report };

inline constexpr std::array kAllStages{Stage::deseason, Stage::estimate, Stage::irf,   Stage::decompose,
                                       Stage::forecast, Stage::condition, Stage::report};

std::string_view stage_name(Stage stage);
/// Throws ConfigError for an unknown name.
Stage parse_stage(std::string_view name);

/// Artifact file names (relative to the output directory) a stage writes.
std::vector<std::string> stage_outputs(Stage stage, const RunConfig& config);
/// Artifacts a stage needs from earlier stages.
std::vector<std::string> stage_inputs(Stage stage, const RunConfig& config);

/// Runs one stage. Reads its inputs from and writes its outputs to `out`.
/// Throws MissingArtifact when an input is absent.
void run_stage(Stage stage, const RunConfig& config, const std::filesystem::path& out);

/// Stable sub-seed for a named random stream under the master seed.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Process exit code for an error escaping a stage: 2 for configuration,
/// data and missing-artifact errors, 3 for numerical failures, 1 otherwise.
int exit_code(const std::exception_ptr& error);

/// File-name-safe form of a variable or scenario name.
std::string file_token(std::string_view name);

}  // namespace svarkit::app
