#pragma once

#include "emas/metrics.hpp"
#include "emas/run_config.hpp"

namespace emas {

/// One logical worker per island running the sequential round loop, at most
/// `cfg.units` of them executing at once. Islands share nothing; emigrants
/// travel by value through per-island inboxes, drained once per round.
/// A step budget is counted per island.
RunTrace run_hybrid(const RunConfig& cfg);

}  // namespace emas
