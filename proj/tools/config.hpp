#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace rrk::cli {

inline constexpr std::string_view kVersion = "1.0.0";

/// Experiment names accepted as subcommands.
[[nodiscard]] const std::vector<std::string>& experiment_names();

/// Fully resolved experiment description.
struct ExperimentSpec {
  std::string experiment;
  std::string problem;
  std::string method;
  std::string scheme;
  std::string invariant = "energy";
  double dt = 0.1;
  double t_end = 10.0;
  std::uint64_t seed = 0x5EED;
  std::string output;  // path prefix for <output>.csv and <output>.json
  std::vector<double> dts;
  int max_s = 12;
  double eccentricity = 0.5;
  long grid = 128;
  std::string direction = "positive";
  long cloud_size = 200;
  double radius = 1e-3;
  long sample_stride = 4;
  std::string gamma_mode = "root";
  std::optional<std::filesystem::path> data_dir;
};

/// Recognised configuration keys (kebab-case, same as the long flags).
[[nodiscard]] const std::vector<std::string>& config_keys();

/// Closest known key for an unknown one, from a synonym table or edit distance.
[[nodiscard]] std::optional<std::string> suggest_key(std::string_view unknown);

/// Default parameters of one experiment as JSON.
[[nodiscard]] nlohmann::json experiment_defaults(std::string_view experiment);

/// Reads a JSON object from disk. Throws IoError or ConfigError.
[[nodiscard]] nlohmann::json load_config_file(const std::filesystem::path& path);

/// defaults <- file <- flags. Unknown keys and ill-typed values throw ConfigError.
[[nodiscard]] ExperimentSpec resolve_spec(std::string_view experiment, const nlohmann::json& file_values,
                                          const nlohmann::json& flag_values);

/// Checks cross-field constraints (scheme, invariant and partition against the problem).
void validate_spec(const ExperimentSpec& spec);

[[nodiscard]] nlohmann::json to_json(const ExperimentSpec& spec);

}  // namespace rrk::cli
