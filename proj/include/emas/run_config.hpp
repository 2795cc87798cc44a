#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <variant>

#include "emas/arenas.hpp"
#include "emas/core.hpp"
#include "emas/metrics.hpp"
#include "emas/topology.hpp"

namespace emas {

struct StepBudget {
  std::uint64_t steps = 0;
};

/// Either a number of population steps or a wall-clock duration.
using Budget = std::variant<StepBudget, std::chrono::milliseconds>;

/// Everything a single engine run needs.
struct RunConfig {
  ProblemConfig problem = ProblemConfig::with_defaults(10, -50.0, 50.0);
  BehaviourConfig behaviour;
  std::size_t islands = 4;
  std::size_t population_per_island = 50;
  TopologyKind topology = TopologyKind::fully_connected;
  Budget budget = std::chrono::milliseconds(60'000);
  std::uint64_t seed = 1;
  /// Cap on worker threads used by the hybrid and concurrent engines.
  std::size_t units = 1;
  /// How long a lone agent waits in a pairwise arena (concurrent engine).
  std::chrono::milliseconds flush_timeout{10};
  /// Best-fitness heartbeat cadence for wall-clock runs.
  std::chrono::milliseconds heartbeat{1000};
  bool ledger = false;
  std::string run_id = "run0";

  void validate() const;

  bool step_budget() const noexcept { return std::holds_alternative<StepBudget>(budget); }
};

/// Resolved configuration as flag-name/value pairs; replaying these as a
/// config file reproduces the run.
ConfigEcho describe(const RunConfig& cfg, Model model);

std::string format_duration(std::chrono::milliseconds d);

}  // namespace emas
