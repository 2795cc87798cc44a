#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "emas/arenas.hpp"
#include "emas/ledger.hpp"
#include "emas/metrics.hpp"
#include "ledger_replay.hpp"

using namespace emas;

namespace {

Agent agent(std::uint64_t id, Fitness fitness, Energy energy, Genotype g = {0.0, 0.0}) {
  return Agent{AgentId{id}, std::move(g), fitness, energy};
}

BehaviourConfig no_migration() {
  BehaviourConfig cfg;
  cfg.migration_probability = 0.0;
  return cfg;
}

ProblemConfig problem(std::size_t n = 2) { return ProblemConfig::with_defaults(n, -50.0, 50.0); }

// Feeds a population plus a round's ledger through the CSV replay oracle.
oracle::LedgerReport replay(const std::vector<Agent>& before, const PartitionResult& r) {
  RunTrace t;
  t.run_id = "t";
  for (const Agent& a : before)
    t.ledger.push_back({0, IslandRef{0}, LedgerEntry{LedgerKind::spawn, a.id, 0, a.energy}});
  for (const LedgerEntry& e : r.ledger) t.ledger.push_back({1, IslandRef{0}, e});
  std::size_t n = 0;
  for (const Agent& a : r.population) {
    t.ledger.push_back({2, IslandRef{0}, LedgerEntry{LedgerKind::final, a.id, 0, a.energy}});
    ++n;
  }
  for (const Emigrant& e : r.emigrants) {
    t.ledger.push_back({2, e.destination, LedgerEntry{LedgerKind::final, e.agent.id, 0, e.agent.energy}});
    ++n;
  }
  t.ledger.push_back({2, IslandRef::all(), LedgerEntry{LedgerKind::end, AgentId{}, 0, static_cast<Energy>(n)}});
  std::ostringstream csv;
  write_trace_csv(csv, t, true);
  return oracle::replay_ledger(csv.str());
}

}  // namespace

TEST_CASE("behaviour routes by energy") {
  RandomSource rng(1);
  const auto cfg = no_migration();
  CHECK(behaviour(agent(1, 0, 0), cfg, rng) == ArenaKind::death);
  CHECK(behaviour(agent(1, 0, 11), cfg, rng) == ArenaKind::reproduction);
  CHECK(behaviour(agent(1, 0, 10), cfg, rng) == ArenaKind::fight);
  CHECK(behaviour(agent(1, 0, 5), cfg, rng) == ArenaKind::fight);
}

TEST_CASE("behaviour never migrates the dead, and migrates at about the configured rate") {
  RandomSource rng(2);
  BehaviourConfig cfg;
  cfg.migration_probability = 0.2;
  int migrations = 0;
  for (int i = 0; i < 10'000; ++i) {
    CHECK(behaviour(agent(1, 0, 0), cfg, rng) == ArenaKind::death);
    migrations += behaviour(agent(1, 0, 5), cfg, rng) == ArenaKind::migration;
  }
  // binomial sd = sqrt(10000 * 0.2 * 0.8) = 40
  CHECK(std::abs(migrations - 2000) < 5 * 40);
}

TEST_CASE("death meeting") {
  CHECK(death_meeting({}).survivors.empty());
  auto r = death_meeting({agent(1, 3, 0)});
  CHECK(r.survivors.empty());
  CHECK(r.emigrants.empty());
  r = death_meeting({agent(1, 3, 0), agent(2, 4, 0)});
  CHECK(r.survivors.empty());
  CHECK(r.ledger.size() == 2);
  CHECK_THROWS_AS(death_meeting({agent(1, 3, 1)}), InvariantViolation);
}

TEST_CASE("fight meeting transfers energy from the worse agent") {
  BehaviourConfig cfg;
  SUBCASE("better first") {
    auto r = fight_meeting(agent(1, 5.0, 4), agent(2, 9.0, 4), cfg);
    CHECK(r.survivors[0].energy == 5);
    CHECK(r.survivors[1].energy == 3);
    CHECK(r.survivors[0].energy + r.survivors[1].energy == 8);
  }
  SUBCASE("better second") {
    auto r = fight_meeting(agent(1, 9.0, 4), agent(2, 5.0, 4), cfg);
    CHECK(r.survivors[0].energy == 3);
    CHECK(r.survivors[1].energy == 5);
  }
  SUBCASE("tie: second loses") {
    auto r = fight_meeting(agent(1, 7.0, 4), agent(2, 7.0, 4), cfg);
    CHECK(r.survivors[0].energy == 5);
    CHECK(r.survivors[1].energy == 3);
  }
  SUBCASE("transfer is clamped to what the loser holds") {
    cfg.fight_transfer = 3;
    auto r = fight_meeting(agent(1, 1.0, 4), agent(2, 2.0, 1), cfg);
    CHECK(r.survivors[0].energy == 5);
    CHECK(r.survivors[1].energy == 0);
    RandomSource rng(3);
    CHECK(behaviour(r.survivors[1], no_migration(), rng) == ArenaKind::death);
  }
}

TEST_CASE("fight winner is invariant under positive fitness scaling") {
  RandomSource rng(4);
  BehaviourConfig cfg;
  for (int i = 0; i < 1000; ++i) {
    const double fa = rng.uniform(0, 100), fb = rng.uniform(0, 100), k = rng.uniform(0.01, 100);
    auto plain = fight_meeting(agent(1, fa, 5), agent(2, fb, 5), cfg);
    auto scaled = fight_meeting(agent(1, fa * k, 5), agent(2, fb * k, 5), cfg);
    CHECK(plain.survivors[0].energy == scaled.survivors[0].energy);
  }
}

TEST_CASE("pair reproduction conserves energy and funds both children") {
  BehaviourConfig cfg;
  auto prob = problem();
  AgentIdSource ids(5);
  RandomSource rng(5);
  auto r = reproduction_meeting({agent(1, 1, 12, {1, 1}), agent(2, 2, 12, {2, 2})}, cfg, prob, ids, rng);
  REQUIRE(r.survivors.size() == 4);
  CHECK(r.births == 2);
  CHECK(r.survivors[0].energy == 7);
  CHECK(r.survivors[1].energy == 7);
  CHECK(r.survivors[2].energy == 5);
  CHECK(r.survivors[3].energy == 5);
  CHECK(total_energy(r.survivors) == 24);
  for (const Agent& c : r.newborns()) {
    CHECK(c.fitness == rastrigin(c.genotype));
    for (double x : c.genotype) CHECK((x >= prob.domain_min && x <= prob.domain_max));
  }
}

TEST_CASE("lone reproduction gives the whole endowment to one mutated child") {
  BehaviourConfig cfg;
  AgentIdSource ids(6);
  RandomSource rng(6);
  auto r = reproduction_meeting({agent(1, 1, 12, {49.9, -49.9})}, cfg, problem(), ids, rng);
  REQUIRE(r.survivors.size() == 2);
  CHECK(r.survivors[0].energy == 2);
  CHECK(r.survivors[1].energy == 10);
  CHECK(total_energy(r.survivors) == 12);
  for (double x : r.survivors[1].genotype) CHECK((x >= -50 && x <= 50));
}

TEST_CASE("underfunded reproduction is an invariant violation") {
  BehaviourConfig cfg;
  AgentIdSource ids;
  RandomSource rng(7);
  CHECK_THROWS_AS(reproduction_meeting({agent(1, 1, 9)}, cfg, problem(), ids, rng), InvariantViolation);
  CHECK_THROWS_AS(reproduction_meeting({agent(1, 1, 12), agent(2, 1, 4)}, cfg, problem(), ids, rng),
                  InvariantViolation);
}

TEST_CASE("migration meeting") {
  RandomSource rng(8);
  SUBCASE("fully connected never sends an agent home") {
    const auto topo = Topology::fully_connected(4);
    auto r = migration_meeting({agent(1, 0, 3), agent(2, 0, 4)}, IslandRef{2}, topo, rng);
    CHECK(r.survivors.empty());
    REQUIRE(r.emigrants.size() == 2);
    for (const auto& e : r.emigrants) {
      CHECK(e.destination.index != 2);
      CHECK(e.destination.index < 4);
    }
  }
  SUBCASE("a lone island keeps its agents") {
    const auto topo = Topology::fully_connected(1);
    auto r = migration_meeting({agent(1, 0, 3)}, IslandRef{0}, topo, rng);
    CHECK(r.emigrants.empty());
    REQUIRE(r.survivors.size() == 1);
    CHECK(r.survivors[0].energy == 3);
  }
  SUBCASE("destinations are uniform over neighbours") {
    const auto topo = Topology::fully_connected(4);
    std::map<std::uint32_t, int> freq;
    std::vector<Agent> group;
    for (int i = 0; i < 10'000; ++i) group.push_back(agent(i, 0, 1));
    auto r = migration_meeting(std::move(group), IslandRef{0}, topo, rng);
    for (const auto& e : r.emigrants) ++freq[e.destination.index];
    CHECK(freq.count(0) == 0);
    // multinomial: expected 3333.3, sd sqrt(10000 * 1/3 * 2/3) ~ 47.1
    for (std::uint32_t d = 1; d < 4; ++d) CHECK(std::abs(freq[d] - 10'000.0 / 3.0) < 5 * 47.14);
  }
}

TEST_CASE("ring topology") {
  auto t = Topology::ring(5);
  CHECK(t.neighbours(IslandRef{0}).size() == 2);
  CHECK(Topology::ring(2).neighbours(IslandRef{0}).size() == 1);
  CHECK(Topology::ring(1).neighbours(IslandRef{0}).empty());
}

TEST_CASE("partition_and_meet edge cases") {
  const auto cfg = no_migration();
  const auto prob = problem();
  const auto topo = Topology::fully_connected(1);
  AgentIdSource ids(1);
  RandomSource rng(9);
  const MeetingContext ctx{cfg, prob, topo, IslandRef{0}, ids, rng};

  CHECK(partition_and_meet({}, ctx).population.empty());
  auto r = partition_and_meet({agent(1, 0, 0)}, ctx);
  CHECK(r.population.empty());
  CHECK(r.counts.deaths == 1);

  r = partition_and_meet({agent(1, 3, 5)}, ctx);
  REQUIRE(r.population.size() == 1);
  CHECK(r.population[0].energy == 5);
  CHECK(r.counts.fights == 0);
}

TEST_CASE("partition_and_meet conserves energy against the ledger oracle") {
  BehaviourConfig cfg;
  cfg.migration_probability = 0.2;
  const auto prob = problem(3);
  const auto topo = Topology::fully_connected(3);
  RandomSource gen(10);
  for (int trial = 0; trial < 500; ++trial) {
    AgentIdSource ids(1);
    RandomSource rng(1000 + trial);
    const MeetingContext ctx{cfg, prob, topo, IslandRef{1}, ids, rng};
    std::vector<Agent> pop;
    const std::size_t n = gen.index(21);
    for (std::size_t i = 0; i < n; ++i) {
      Genotype g(3);
      for (double& x : g) x = gen.uniform(-50, 50);
      pop.push_back(make_agent(AgentId{i}, std::move(g), static_cast<Energy>(gen.index(16))));
    }
    const auto before = pop;
    auto r = partition_and_meet(pop, ctx);

    Energy out = total_energy(r.population);
    for (const auto& e : r.emigrants) out += e.agent.energy;
    CHECK(out == total_energy(before));

    const auto report = replay(before, r);
    CHECK_MESSAGE(report.verdict == oracle::LedgerVerdict::balanced, report.reason);

    const std::size_t after = r.population.size() + r.emigrants.size();
    CHECK(after == before.size() + r.counts.births - r.counts.deaths);
    for (const auto& a : r.population) CHECK(a.energy >= 0);
  }
}
