#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tcsim/cli/config.hpp"

namespace tcsim::cli {

struct Metric {
  std::string name;
  double value = 0.0;
  bool boolean = false;
};

/// In-memory result files, written and hashed by the caller.
struct Bundle {
  std::vector<std::pair<std::string, std::string>> files;  // name, content
  void add(std::string name, std::string content) { files.emplace_back(std::move(name), std::move(content)); }
};

struct Outcome {
  std::vector<Metric> metrics;  // same names and order for every parameter point
  bool blew_up = false;
};

/// Runs one parameter point over the seeds. With a bundle, also renders the
/// per-point data files. `params` must be a complete, validated block.
Outcome evaluate(const std::string& experiment, const std::string& name, const Json& params,
                 std::span<const std::uint64_t> seeds, unsigned workers, Bundle* bundle);

struct RunReport {
  std::filesystem::path manifest;
  std::vector<Metric> metrics;
  bool blew_up = false;
};

/// Writes the bundle, effective_config.json, metrics.csv and manifest.json
/// into config.out.
RunReport run_experiment(const ExperimentConfig& config, unsigned workers);

/// Evaluates every grid point (paired seeds), then writes scan.csv,
/// scan.svg, effective_config.json and manifest.json.
RunReport scan_experiment(const ExperimentConfig& config, unsigned workers);

}  // namespace tcsim::cli
