#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "alns/baseline.hpp"
#include "alns/evaluator.hpp"
#include "alns/evolve.hpp"
#include "alns/evolved.hpp"
#include "alns/proposer.hpp"

namespace alns {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PathsConfig {
  std::filesystem::path instances_dir;
  std::filesystem::path bks_file;
  std::filesystem::path sets_file;
  std::filesystem::path output_dir = "runs";
};

struct ProposerConfig {
  /// "mutate" or "llm".
  std::string mode = "mutate";
  LlmConfig llm{"", "", "OPENAI_API_KEY"};
};

struct EvaluationConfig {
  /// Empty means the default six-instance subset.
  std::vector<std::string> instances;
  std::int64_t iterations = 1000;
  int seeds_per_instance = 2;
  double time_scale = 1.0;
  EngineParams engine;
};

struct BenchConfig {
  std::string setting = "iters1000";
  /// Instance names, or one of "evo", "test" or a group name such as "Small-Evo".
  std::vector<std::string> instances{"evo"};
  int repetitions = 10;
  int threads = 0;
  std::vector<std::string> variants{"baseline", "evolved"};
};

struct Config {
  PathsConfig paths;
  BaselineParams baseline;
  EvolvedParams evolved;
  EvaluationConfig evaluation;
  EvolveConfig evolve;
  BenchConfig bench;
  ProposerConfig proposer;
  std::uint64_t seed = 42;

  /// Defaults with data paths under `data_dir`.
  static Config defaults(const std::filesystem::path& data_dir);
  /// Overlays the file on top of defaults(data_dir). Relative paths in the
  /// file are resolved against the file's directory.
  static Config load(const std::filesystem::path& file, const std::filesystem::path& data_dir);
  static Config from_json(const nlohmann::json& j, const std::filesystem::path& data_dir,
                          const std::filesystem::path& base_dir = {});

  /// Throws ConfigError on missing paths or out-of-range values.
  void validate() const;
  nlohmann::json to_json() const;
};

/// Replaces every ${NAME} in string values with the environment variable's
/// value. Throws ConfigError when a variable is unset.
nlohmann::json interpolate_env(const nlohmann::json& j);

}  // namespace alns
