#include "emas/engine_seq.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

namespace emas {

namespace {
constexpr std::uint64_t kDynamicsStream = std::numeric_limits<std::uint64_t>::max();
}

std::vector<Agent> seed_island(const RunConfig& cfg, IslandRef island, AgentIdSource& ids) {
  RandomSource rng = RandomSource::derive(cfg.seed, island.index);
  return initial_population(cfg.population_per_island, cfg.problem, cfg.behaviour.initial_energy,
                            ids, rng);
}

namespace {

void log_spawns(RunRecorder& rec, const Island& island) {
  if (!rec.ledger.enabled()) return;
  for (const Agent& a : island.agents)
    rec.ledger.append(0.0, island.ref, LedgerEntry{LedgerKind::spawn, a.id, 0, a.energy});
}

std::optional<Fitness> best_of(const std::vector<Agent>& agents) {
  std::optional<Fitness> best;
  for (const Agent& a : agents)
    if (!best || a.fitness < *best) best = a.fitness;
  return best;
}

}  // namespace

SimState initial_state(const RunConfig& cfg, RunRecorder* recorder) {
  cfg.validate();
  SimState state;
  state.rng = RandomSource::derive(cfg.seed, kDynamicsStream);
  state.islands.reserve(cfg.islands);
  for (std::uint32_t i = 0; i < cfg.islands; ++i) {
    Island island{IslandRef{i}, seed_island(cfg, IslandRef{i}, state.ids)};
    if (recorder) {
      log_spawns(*recorder, island);
      recorder->emit(0.0, island.ref, {}, best_of(island.agents));
    }
    state.islands.push_back(std::move(island));
  }
  return state;
}

Energy total_energy(const SimState& state) noexcept {
  Energy sum = 0;
  for (const Island& i : state.islands) sum += total_energy(i.agents);
  return sum;
}

IslandRound run_island_round(std::vector<Agent>& agents, IslandRef island, const RunConfig& cfg,
                             const Topology& topology, AgentIdSource& ids, RandomSource& rng,
                             RunRecorder* recorder, double timestamp_ms) {
  const MeetingContext ctx{cfg.behaviour, cfg.problem, topology, island, ids, rng};
  PartitionResult r = partition_and_meet(std::move(agents), ctx);
  agents = std::move(r.population);
  if (recorder) {
    recorder->ledger.append_all(timestamp_ms, island, r.ledger);
    recorder->emit(timestamp_ms, island, r.counts, r.best_newborn);
  }
  return IslandRound{std::move(r.emigrants), r.counts};
}

MeetingCounts step(SimState& state, const RunConfig& cfg, const Topology& topology,
                   RunRecorder* recorder) {
  const double now = recorder == nullptr          ? 0.0
                     : recorder->logical_time() ? static_cast<double>(state.step_counter + 1)
                                                : recorder->elapsed_ms();
  MeetingCounts totals;
  std::vector<Emigrant> in_transit;
  for (Island& island : state.islands) {
    IslandRound round = run_island_round(island.agents, island.ref, cfg, topology, state.ids,
                                         state.rng, recorder, now);
    totals += round.counts;
    for (Emigrant& e : round.emigrants) in_transit.push_back(std::move(e));
  }
  for (Emigrant& e : in_transit) state.islands.at(e.destination.index).agents.push_back(std::move(e.agent));
  for (Island& island : state.islands)
    std::shuffle(island.agents.begin(), island.agents.end(), state.rng);
  ++state.step_counter;
  return totals;
}

RunTrace run_sequential(const RunConfig& cfg) {
  RunRecorder rec(cfg.step_budget(), cfg.ledger);
  const Topology topology = Topology::make(cfg.topology, cfg.islands);
  SimState state = initial_state(cfg, &rec);

  RunTrace trace;
  trace.run_id = cfg.run_id;
  trace.model = Model::sequential;
  trace.config = describe(cfg, Model::sequential);
  trace.logical_time = cfg.step_budget();
  trace.initial_energy = total_energy(state);

  if (const auto* budget = std::get_if<StepBudget>(&cfg.budget)) {
    for (std::uint64_t s = 0; s < budget->steps; ++s) trace.totals += step(state, cfg, topology, &rec);
  } else {
    const double limit = static_cast<double>(std::get<std::chrono::milliseconds>(cfg.budget).count());
    const double beat = static_cast<double>(cfg.heartbeat.count());
    double next_beat = beat;
    while (rec.elapsed_ms() < limit) {
      trace.totals += step(state, cfg, topology, &rec);
      if (const double now = rec.elapsed_ms(); now >= next_beat) {
        rec.metrics.heartbeat(now);
        next_beat += beat;
      }
    }
  }

  const double end = rec.logical_time() ? static_cast<double>(state.step_counter) : rec.elapsed_ms();
  std::size_t survivors = 0;
  for (const Island& island : state.islands) {
    survivors += island.agents.size();
    for (const Agent& a : island.agents)
      rec.ledger.append(end, island.ref, LedgerEntry{LedgerKind::final, a.id, 0, a.energy});
  }
  rec.ledger.append(end, IslandRef::all(),
                    LedgerEntry{LedgerKind::end, AgentId{}, 0, static_cast<Energy>(survivors)});
  rec.metrics.close();

  trace.elapsed_ms = rec.elapsed_ms();
  trace.final_energy = total_energy(state);
  trace.final_population = survivors;
  trace.lost_events = rec.metrics.lost();
  trace.events = rec.metrics.take();
  trace.ledger = rec.ledger.take();
  trace.finalize();
  return trace;
}

}  // namespace emas
