#include "tcsim/cli/app.hpp"

#include <CLI11.hpp>

#include "tcsim/cli/config.hpp"
#include "tcsim/cli/experiments.hpp"
#include "tcsim/core/ensemble.hpp"
#include "tcsim/core/errors.hpp"

namespace tcsim::cli {
namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  unsigned workers = 1;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* command, CommonFlags& flags) {
  command->add_option("--config", flags.config, "Experiment config (JSON)")->required();
  command->add_option("--seed", flags.seed, "First seed; keeps the configured seed count");
  command->add_option("--out", flags.out, "Output directory");
  command->add_option("--workers", flags.workers, "Replica threads (0: all cores); never changes results");
  command->add_option("--set", flags.overrides, "Dotted-path override key=value (repeatable)");
}

ExperimentConfig load(const CommonFlags& flags) {
  Json document = load_json_file(flags.config);
  for (const auto& assignment : flags.overrides) apply_override(document, assignment);
  ExperimentConfig config = validate_config(document);
  if (flags.seed) config.seeds = core::seed_range(*flags.seed, config.seeds.size());
  if (!flags.out.empty()) config.out = flags.out;
  return config;
}

void print_metrics(std::ostream& out, const RunReport& report) {
  for (const auto& m : report.metrics)
    out << m.name << " = " << (m.boolean ? (m.value != 0.0 ? "true" : "false") : std::to_string(m.value)) << "\n";
  out << "manifest: " << report.manifest.string() << "\n";
}

}  // namespace

int run_app(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discrete time-crystal simulations: batch runs and parameter scans"};
  app.require_subcommand(1);
  CommonFlags run_flags, scan_flags;
  auto* run = app.add_subcommand("run", "Run one parameter point and write a result bundle");
  add_common(run, run_flags);
  auto* scan = app.add_subcommand("scan", "Evaluate the scan grid and write scan.csv plus a heat map");
  add_common(scan, scan_flags);
  std::string experiment, name;
  auto* defaults = app.add_subcommand("defaults", "Print a complete config with default parameters");
  defaults->add_option("experiment", experiment)->required();
  defaults->add_option("name", name)->required();
  auto* list = app.add_subcommand("list", "List experiments");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (list->parsed()) {
      for (const auto& [e, n] : known_experiments()) out << e << " " << n << "\n";
      return kExitOk;
    }
    if (defaults->parsed()) {
      out << default_config(experiment, name).dump(2) << "\n";
      return kExitOk;
    }
    const bool scanning = scan->parsed();
    const CommonFlags& flags = scanning ? scan_flags : run_flags;
    const ExperimentConfig config = load(flags);
    const RunReport report = scanning ? scan_experiment(config, flags.workers) : run_experiment(config, flags.workers);
    print_metrics(out, report);
    if (report.blew_up) {
      err << "error: simulation blew up; partial outputs kept in " << config.out.string() << "\n";
      return kExitRuntime;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const PreconditionError& e) {
    err << "invalid parameters: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace tcsim::cli
