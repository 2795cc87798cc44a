#include "emas/arenas.hpp"

#include <algorithm>
#include <utility>

namespace emas {

void BehaviourConfig::validate() const {
  if (reproduction_threshold < 1) throw ConfigError("reproduction-threshold must be positive");
  if (!(migration_probability >= 0.0 && migration_probability < 1.0))
    throw ConfigError("migration-prob must lie in [0, 1)");
  if (fight_transfer < 1) throw ConfigError("fight-transfer must be at least 1");
  if (child_energy < 2 || child_energy % 2 != 0)
    throw ConfigError("child-energy must be a positive even number");
  if (reproduction_threshold < child_energy)
    throw ConfigError("reproduction-threshold must be at least child-energy");
  if (initial_energy < 1) throw ConfigError("initial-energy must be positive");
}

ArenaKind behaviour(const Agent& agent, const BehaviourConfig& cfg, RandomSource& rng) {
  if (agent.energy == 0) return ArenaKind::death;
  if (rng.bernoulli(cfg.migration_probability)) return ArenaKind::migration;
  if (agent.energy > cfg.reproduction_threshold) return ArenaKind::reproduction;
  return ArenaKind::fight;
}

MeetingResult death_meeting(std::vector<Agent> group) {
  MeetingResult result;
  for (const Agent& a : group) {
    if (a.energy != 0)
      throw InvariantViolation("death arena received agent " + std::to_string(a.id.value) +
                               " with energy " + std::to_string(a.energy));
    result.ledger.push_back(LedgerEntry{LedgerKind::death, a.id, 0, 0});
  }
  return result;
}

MeetingResult fight_meeting(Agent first, Agent second, const BehaviourConfig& cfg) {
  const bool second_loses = second.fitness >= first.fitness;
  Agent& loser = second_loses ? second : first;
  Agent& winner = second_loses ? first : second;
  const Energy transfer = std::min(cfg.fight_transfer, loser.energy);
  loser.energy -= transfer;
  winner.energy += transfer;

  MeetingResult result;
  result.ledger.push_back(LedgerEntry{LedgerKind::transfer, loser.id, winner.id.value, transfer});
  result.survivors.reserve(2);
  result.survivors.push_back(std::move(first));
  result.survivors.push_back(std::move(second));
  return result;
}

namespace {

void donate(Agent& parent, Energy amount, MeetingResult& result, AgentId child) {
  if (parent.energy < amount)
    throw InvariantViolation("parent " + std::to_string(parent.id.value) + " holds " +
                             std::to_string(parent.energy) + ", cannot fund " +
                             std::to_string(amount));
  parent.energy -= amount;
  result.ledger.push_back(LedgerEntry{LedgerKind::birth, child, parent.id.value, 0});
  result.ledger.push_back(LedgerEntry{LedgerKind::donate, parent.id, child.value, amount});
}

}  // namespace

MeetingResult reproduction_meeting(std::vector<Agent> group, const BehaviourConfig& cfg,
                                   const ProblemConfig& problem, AgentIdSource& ids,
                                   RandomSource& rng) {
  MeetingResult result;
  if (group.size() == 1) {
    Agent& parent = group.front();
    const AgentId child_id = ids.next();
    donate(parent, cfg.child_energy, result, child_id);
    Agent child = make_agent(child_id, mutate(parent.genotype, problem, rng), cfg.child_energy);
    result.survivors.push_back(std::move(parent));
    result.survivors.push_back(std::move(child));
    result.births = 1;
    return result;
  }
  if (group.size() != 2)
    throw InvariantViolation("reproduction meeting needs one or two agents, got " +
                             std::to_string(group.size()));

  Agent& a = group[0];
  Agent& b = group[1];
  const Energy share = cfg.child_energy / 2;
  const AgentId first_id = ids.next();
  const AgentId second_id = ids.next();
  donate(a, share, result, first_id);
  donate(b, share, result, second_id);

  auto [g1, g2] = recombine(a.genotype, b.genotype, problem, rng);
  Agent c1 = make_agent(first_id, mutate(g1, problem, rng), share);
  Agent c2 = make_agent(second_id, mutate(g2, problem, rng), share);
  result.survivors.reserve(4);
  result.survivors.push_back(std::move(a));
  result.survivors.push_back(std::move(b));
  result.survivors.push_back(std::move(c1));
  result.survivors.push_back(std::move(c2));
  result.births = 2;
  return result;
}

MeetingResult migration_meeting(std::vector<Agent> group, IslandRef self,
                                const Topology& topology, RandomSource& rng) {
  MeetingResult result;
  if (topology.neighbours(self).empty()) {
    result.survivors = std::move(group);
    return result;
  }
  result.emigrants.reserve(group.size());
  for (Agent& a : group) {
    const IslandRef dest = topology.pick_destination(self, rng);
    result.ledger.push_back(LedgerEntry{LedgerKind::migrate, a.id, dest.index, 0});
    result.emigrants.push_back(Emigrant{std::move(a), dest});
  }
  return result;
}

namespace {

void absorb(PartitionResult& out, MeetingResult&& r) {
  for (const Agent& child : r.newborns())
    if (!out.best_newborn || child.fitness < *out.best_newborn) out.best_newborn = child.fitness;
  out.counts.births += r.births;
  for (Agent& a : r.survivors) out.population.push_back(std::move(a));
  for (Emigrant& e : r.emigrants) out.emigrants.push_back(std::move(e));
  out.ledger.insert(out.ledger.end(), r.ledger.begin(), r.ledger.end());
}

}  // namespace

PartitionResult partition_and_meet(std::vector<Agent> population, const MeetingContext& ctx) {
  std::array<std::vector<Agent>, kArenaKinds.size()> groups;
  for (Agent& a : population) {
    const ArenaKind k = behaviour(a, ctx.behaviour, ctx.rng);
    groups[static_cast<std::size_t>(k)].push_back(std::move(a));
  }
  auto& dying = groups[static_cast<std::size_t>(ArenaKind::death)];
  auto& fighters = groups[static_cast<std::size_t>(ArenaKind::fight)];
  auto& breeders = groups[static_cast<std::size_t>(ArenaKind::reproduction)];
  auto& migrants = groups[static_cast<std::size_t>(ArenaKind::migration)];

  PartitionResult out;
  out.population.reserve(population.size() + breeders.size());

  out.counts.deaths = dying.size();
  absorb(out, death_meeting(std::move(dying)));

  std::shuffle(fighters.begin(), fighters.end(), ctx.rng);
  std::size_t i = 0;
  for (; i + 1 < fighters.size(); i += 2) {
    absorb(out, fight_meeting(std::move(fighters[i]), std::move(fighters[i + 1]), ctx.behaviour));
    ++out.counts.fights;
  }
  if (i < fighters.size()) out.population.push_back(std::move(fighters[i]));

  std::shuffle(breeders.begin(), breeders.end(), ctx.rng);
  for (i = 0; i < breeders.size(); i += 2) {
    std::vector<Agent> group;
    group.push_back(std::move(breeders[i]));
    if (i + 1 < breeders.size()) group.push_back(std::move(breeders[i + 1]));
    absorb(out, reproduction_meeting(std::move(group), ctx.behaviour, ctx.problem, ctx.ids,
                                     ctx.rng));
  }

  MeetingResult moved = migration_meeting(std::move(migrants), ctx.island, ctx.topology, ctx.rng);
  out.counts.migrations = moved.emigrants.size();
  absorb(out, std::move(moved));
  return out;
}

std::string to_string(ArenaKind kind) {
  switch (kind) {
    case ArenaKind::death: return "death";
    case ArenaKind::fight: return "fight";
    case ArenaKind::reproduction: return "reproduction";
    case ArenaKind::migration: return "migration";
  }
  return "unknown";
}

}  // namespace emas
