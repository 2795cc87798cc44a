#pragma once

// Exhaustive outcome sets for one meeting round of a small population:
// every shuffle order and, for uniform crossover, every crossover mask.
// Rules are re-derived here rather than borrowed from the engines.

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "emas/arenas.hpp"
#include "emas/core.hpp"

namespace emas::oracle {

struct OutcomeAgent {
  /// Id of a pre-existing agent; empty for a newborn.
  std::optional<std::uint64_t> origin;
  long long energy = 0;
  /// Only filled when genotypes are compared (mutation disabled).
  std::vector<double> genotype;
  friend auto operator<=>(const OutcomeAgent&, const OutcomeAgent&) = default;
};

using Outcome = std::vector<OutcomeAgent>;

struct EnumerationOptions {
  bool compare_genotypes = true;
};

/// Population must have at most 6 agents; migration is not enumerated.
std::set<Outcome> enumerate_meetings(const std::vector<Agent>& population,
                                     const BehaviourConfig& behaviour,
                                     const ProblemConfig& problem,
                                     EnumerationOptions options = {});

/// Canonical (sorted) form of a post-round population.
Outcome canonical_outcome(const std::vector<Agent>& before, const std::vector<Agent>& after,
                          EnumerationOptions options = {});

/// Every enumerated outcome holds the same total energy as the input.
bool outcomes_conserve_energy(const std::vector<Agent>& population, const std::set<Outcome>& outcomes);

}  // namespace emas::oracle
