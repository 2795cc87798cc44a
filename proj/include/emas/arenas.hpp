#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "emas/core.hpp"
#include "emas/ledger.hpp"
#include "emas/random.hpp"
#include "emas/topology.hpp"

namespace emas {

enum class ArenaKind { death, fight, reproduction, migration };

inline constexpr std::array<ArenaKind, 4> kArenaKinds = {
    ArenaKind::death, ArenaKind::fight, ArenaKind::reproduction, ArenaKind::migration};

struct BehaviourConfig {
  /// Agents holding strictly more than this reproduce.
  Energy reproduction_threshold = 10;
  double migration_probability = 0.01;
  Energy fight_transfer = 1;
  /// Endowment per reproduction: split evenly across the two children of a
  /// pair (each parent funds one half), or given whole to a lone child.
  Energy child_energy = 10;
  Energy initial_energy = 10;

  void validate() const;
};

struct Emigrant {
  Agent agent;
  IslandRef destination;
};

/// Outcome of one meeting. Survivors list existing participants first, in
/// input order, followed by `births` newborns.
struct MeetingResult {
  std::vector<Agent> survivors;
  std::vector<Emigrant> emigrants;
  std::vector<LedgerEntry> ledger;
  std::size_t births = 0;

  std::span<const Agent> newborns() const {
    return std::span<const Agent>(survivors).subspan(survivors.size() - births);
  }
};

ArenaKind behaviour(const Agent& agent, const BehaviourConfig& cfg, RandomSource& rng);

MeetingResult death_meeting(std::vector<Agent> group);

/// Lower fitness wins; on a tie the second agent loses.
MeetingResult fight_meeting(Agent first, Agent second, const BehaviourConfig& cfg);

/// One parent reproduces asexually (mutation only), two recombine.
MeetingResult reproduction_meeting(std::vector<Agent> group, const BehaviourConfig& cfg,
                                   const ProblemConfig& problem, AgentIdSource& ids,
                                   RandomSource& rng);

MeetingResult migration_meeting(std::vector<Agent> group, IslandRef self,
                                const Topology& topology, RandomSource& rng);

struct MeetingCounts {
  std::uint64_t fights = 0;
  std::uint64_t births = 0;
  std::uint64_t deaths = 0;
  std::uint64_t migrations = 0;

  MeetingCounts& operator+=(const MeetingCounts& o) {
    fights += o.fights;
    births += o.births;
    deaths += o.deaths;
    migrations += o.migrations;
    return *this;
  }
};

struct MeetingContext {
  const BehaviourConfig& behaviour;
  const ProblemConfig& problem;
  const Topology& topology;
  IslandRef island;
  AgentIdSource& ids;
  RandomSource& rng;
};

struct PartitionResult {
  std::vector<Agent> population;
  std::vector<Emigrant> emigrants;
  std::vector<LedgerEntry> ledger;
  MeetingCounts counts;
  /// Minimum fitness among this round's newborns, if any were born.
  std::optional<Fitness> best_newborn;
};

/// Routes every agent through behaviour(), pairs fight and reproduction
/// partitions after shuffling, and applies each arena's meeting. An odd
/// fighter passes through unchanged; an odd reproducer breeds alone.
PartitionResult partition_and_meet(std::vector<Agent> population, const MeetingContext& ctx);

std::string to_string(ArenaKind kind);

}  // namespace emas
