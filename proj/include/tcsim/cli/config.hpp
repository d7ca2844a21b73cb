#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace tcsim::cli {

using Json = nlohmann::json;

/// Invalid configuration or command line; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScanAxis {
  std::string param;  // key inside the params block
  std::vector<double> values;
};

struct ScanSpec {
  std::vector<ScanAxis> axes;  // one or two; axes[0] is the outer loop and the heat-map x axis
  std::string metric;          // heat-map color; empty selects the first metric
};

struct ExperimentConfig {
  std::string experiment;  // quantum | oscillator | pca | cdw
  std::string name;        // sub-experiment
  Json params;             // complete: defaults merged with the user block
  std::vector<std::uint64_t> seeds;
  std::filesystem::path out = "tcsim_out";
  std::optional<ScanSpec> scan;

  /// Canonical form that validates back to an identical config. The bundle
  /// copy leaves out "out", so it is identical wherever the bundle lives.
  Json effective(bool with_out = true) const;
  /// Exact bytes of effective_config.json.
  std::string effective_text() const;
  /// SHA-256 of effective_text().
  std::string hash() const;
};

/// Registered (experiment, name) pairs.
std::vector<std::pair<std::string, std::string>> known_experiments();

/// Complete parameter block with default values.
Json default_params(const std::string& experiment, const std::string& name);

/// A full config document for (experiment, name) with default params.
Json default_config(const std::string& experiment, const std::string& name);

/// Parses JSON text; syntax errors report line and column.
Json parse_json_text(const std::string& text, const std::string& source);

/// Reads and parses a config file.
Json load_json_file(const std::filesystem::path& path);

/// Dotted-path override, e.g. "params.epsilon=0.1" or "seeds=[1,2]". The
/// value is parsed as JSON, falling back to a plain string. Intermediate
/// objects are created as needed; validation catches unknown paths.
void apply_override(Json& document, const std::string& assignment);

/// Schema validation. Unknown keys at any level, type mismatches, bad enum
/// choices, duplicate seeds and empty scan grids throw ConfigError naming
/// the offending field.
ExperimentConfig validate_config(const Json& document);

}  // namespace tcsim::cli
