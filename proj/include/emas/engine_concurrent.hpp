#pragma once

#include "emas/metrics.hpp"
#include "emas/run_config.hpp"

namespace emas {

/// Every agent and every arena is its own lightweight task on a pool of
/// `cfg.units` workers; there is no population-wide step. An island is the
/// set of four arena addresses its agents talk to, and migrating means being
/// handed another island's set. Requires a wall-clock budget.
///
/// Shutdown drains instead of cutting: arenas stop meeting, and every agent
/// they hold or later receive is recorded as a survivor, so the energy
/// ledger closes exactly.
RunTrace run_concurrent(const RunConfig& cfg);

}  // namespace emas
