#pragma once

// Subcommands: train, eval, verify, analyze-degrees, gen-dataset.
//
// Exit codes: 0 success, 1 verification violations or unexpected failure,
// 2 configuration error, 3 data error, 4 numeric abort, 5 checkpoint and
// dataset vocabularies differ.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hyperkg/training.hpp"
#include "json.hpp"

namespace hyperkg::cli {

enum ExitCode : int {
  kOk = 0,
  kViolation = 1,
  kConfigError = 2,
  kDataError = 3,
  kNumericError = 4,
  kVocabMismatch = 5,
};

struct RunConfig {
  TrainConfig train;
  std::filesystem::path data_dir;
  std::filesystem::path out_dir;
  std::vector<int> ks{10};
};

std::vector<std::string> preset_names();

/// Hyper-parameter rows for a named preset. Throws ConfigError.
nlohmann::json preset_json(std::string_view name);

nlohmann::json default_json();

/// Layers defaults < preset < config file < flags, key by key. Unknown keys
/// and ill-typed values throw ConfigError.
RunConfig resolve_run_config(const std::optional<std::string>& preset, const nlohmann::json& file,
                             const nlohmann::json& flags);

nlohmann::json to_json(const RunConfig& config);

/// Full command line, argv[0] included.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hyperkg::cli
