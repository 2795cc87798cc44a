#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "emas/core.hpp"
#include "emas/metrics.hpp"
#include "emas/run_config.hpp"

namespace emas {

/// Bad command line or config file. `exit_code` is 0 for --help.
class UsageError : public ConfigError {
 public:
  UsageError(const std::string& message, int exit_code) : ConfigError(message), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

struct ExperimentConfig {
  std::vector<Model> models = {Model::sequential, Model::hybrid, Model::concurrent};
  RunConfig run;
  std::size_t repeats = 10;
  std::filesystem::path out = "emas-results";
  double bucket_ms = 1000.0;

  void validate() const;
};

/// Flags override config-file values. The file is flat `key=value` lines
/// named after the long flags (without dashes); `#` starts a comment.
ExperimentConfig parse_config(const std::vector<std::string>& args);

RunTrace run_model(Model model, const RunConfig& cfg);

/// Failures of the run-level checks: energy conservation, lost metric
/// events, monotone series. Empty when the trace is clean.
std::vector<std::string> check_trace(const RunTrace& trace);

/// Runs every repeat of every selected model, writes one trace CSV per run
/// plus summary.csv, prints a table to `report`. Returns the exit status.
int run_experiment(const ExperimentConfig& cfg, std::ostream& report);

}  // namespace emas
