#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "emas/engine_hybrid.hpp"
#include "emas/engine_seq.hpp"
#include "ledger_replay.hpp"

using namespace emas;

namespace {

RunConfig small(std::size_t islands, std::uint64_t steps, std::uint64_t seed = 5) {
  RunConfig cfg;
  cfg.islands = islands;
  cfg.population_per_island = 20;
  cfg.budget = StepBudget{steps};
  cfg.seed = seed;
  cfg.units = 2;
  cfg.ledger = true;
  return cfg;
}

oracle::LedgerReport replay(const RunTrace& t) {
  std::ostringstream out;
  write_trace_csv(out, t, true);
  return oracle::replay_ledger(out.str());
}

// Two-sided Mann-Whitney U with the normal approximation (tie-corrected).
double mann_whitney_z(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<std::pair<double, int>> all;
  for (double v : a) all.emplace_back(v, 0);
  for (double v : b) all.emplace_back(v, 1);
  std::sort(all.begin(), all.end());
  const double n = static_cast<double>(all.size());
  double rank_a = 0.0, ties = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j].first == all[i].first) ++j;
    const double mid = (static_cast<double>(i + j) + 1.0) / 2.0;
    const double t = static_cast<double>(j - i);
    ties += t * t * t - t;
    for (std::size_t k = i; k < j; ++k)
      if (all[k].second == 0) rank_a += mid;
    i = j;
  }
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double u = rank_a - na * (na + 1.0) / 2.0;
  const double mean = na * nb / 2.0;
  const double var = na * nb / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
  return (u - mean) / std::sqrt(var);
}

}  // namespace

TEST_CASE("single island has no migration traffic") {
  RunConfig cfg = small(1, 200);
  cfg.behaviour.migration_probability = 0.2;
  const RunTrace t = run_hybrid(cfg);
  CHECK(t.totals.migrations == 0);
  for (const LedgerEvent& e : t.ledger) CHECK(e.entry.kind != LedgerKind::migrate);
  CHECK(t.conserved());
}

TEST_CASE("every island receives immigrants") {
  RunConfig cfg = small(4, 300);
  cfg.behaviour.migration_probability = 0.05;
  const RunTrace t = run_hybrid(cfg);
  std::vector<std::size_t> arrivals(4, 0);
  for (const LedgerEvent& e : t.ledger)
    if (e.entry.kind == LedgerKind::migrate) {
      CHECK(e.entry.other != e.island.index);
      ++arrivals.at(e.entry.other);
    }
  for (std::size_t n : arrivals) CHECK(n >= 1);
  CHECK(t.totals.migrations == arrivals[0] + arrivals[1] + arrivals[2] + arrivals[3]);
}

TEST_CASE("ledger balances at shutdown") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RunConfig cfg = small(4, 0, seed);
    cfg.behaviour.migration_probability = 0.1;
    cfg.budget = std::chrono::milliseconds(150);
    const RunTrace t = run_hybrid(cfg);
    CHECK(t.conserved());
    CHECK(t.shutdown_losses == 0);
    const auto r = replay(t);
    INFO(r.reason);
    CHECK(r.verdict == oracle::LedgerVerdict::balanced);
    CHECK(r.initial_total == 800);
  }
}

TEST_CASE("zero-step budget stops before any round") {
  const RunTrace t = run_hybrid(small(3, 0));
  CHECK(t.totals.births == 0);
  CHECK(t.final_population == 60);
  CHECK(t.conserved());
}

TEST_CASE("best-ever series is non-increasing") {
  RunConfig cfg = small(4, 0);
  cfg.budget = std::chrono::milliseconds(300);
  cfg.heartbeat = std::chrono::milliseconds(50);
  const RunTrace t = run_hybrid(cfg);
  const auto& s = t.best_fitness_series;
  REQUIRE(s.size() > 1);
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i].y <= s[i - 1].y);
  const auto& rc = t.reproduction_cumulative;
  for (std::size_t i = 1; i < rc.size(); ++i) CHECK(rc[i].y >= rc[i - 1].y);
}

TEST_CASE("one island matches the sequential engine in distribution") {
  std::vector<double> seq, hyb;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    RunConfig cfg = small(1, 150, seed);
    cfg.behaviour.migration_probability = 0.0;
    cfg.ledger = false;
    seq.push_back(*run_sequential(cfg).best());
    hyb.push_back(*run_hybrid(cfg).best());
  }
  const double z = mann_whitney_z(seq, hyb);
  INFO("z = " << z);
  CHECK(std::abs(z) < 3.29);  // two-sided alpha 0.001
}
