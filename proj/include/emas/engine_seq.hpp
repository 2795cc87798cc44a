#pragma once

#include <cstdint>
#include <vector>

#include "emas/arenas.hpp"
#include "emas/core.hpp"
#include "emas/metrics.hpp"
#include "emas/random.hpp"
#include "emas/run_config.hpp"
#include "emas/topology.hpp"

namespace emas {

struct Island {
  IslandRef ref;
  std::vector<Agent> agents;
};

struct SimState {
  std::vector<Island> islands;
  std::uint64_t step_counter = 0;
  RandomSource rng{0};
  AgentIdSource ids;
};

/// Initial agents of one island, drawn from a stream derived from the run
/// seed and the island index, so every engine starts from the same genotypes.
std::vector<Agent> seed_island(const RunConfig& cfg, IslandRef island, AgentIdSource& ids);

/// Fresh state; logs spawns and the initial best per island to `recorder`.
SimState initial_state(const RunConfig& cfg, RunRecorder* recorder = nullptr);

Energy total_energy(const SimState& state) noexcept;

/// One meeting round on one island. Emigrants are handed back for the caller
/// to deliver; shuffling is left to the caller.
struct IslandRound {
  std::vector<Emigrant> emigrants;
  MeetingCounts counts;
};
IslandRound run_island_round(std::vector<Agent>& agents, IslandRef island, const RunConfig& cfg,
                             const Topology& topology, AgentIdSource& ids, RandomSource& rng,
                             RunRecorder* recorder, double timestamp_ms);

/// Meets every island, delivers emigrants, shuffles every island and bumps
/// the step counter.
MeetingCounts step(SimState& state, const RunConfig& cfg, const Topology& topology,
                   RunRecorder* recorder = nullptr);

/// Single-context run to the configured step budget or wall-clock duration.
RunTrace run_sequential(const RunConfig& cfg);

}  // namespace emas
