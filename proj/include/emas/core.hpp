#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "emas/random.hpp"

namespace emas {

/// Bad user-supplied configuration. Aborts the run before it starts.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A broken engine invariant (energy conservation, death at nonzero energy,
/// an underfunded reproduction). Aborts the run.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Objective value, minimized.
using Fitness = double;

/// Life-energy in whole units; integral so conservation is exactly checkable.
using Energy = std::int64_t;

/// Candidate solution. Immutable once an agent is born with it.
using Genotype = std::vector<double>;

struct AgentId {
  std::uint64_t value = 0;
  friend constexpr auto operator<=>(AgentId, AgentId) = default;
};

/// Hands out unique agent ids within one execution context. The tag
/// occupies the high 16 bits so independent contexts never collide.
class AgentIdSource {
 public:
  explicit AgentIdSource(std::uint16_t tag = 0) : next_(std::uint64_t{tag} << 48) {}
  AgentId next() { return AgentId{next_++}; }

 private:
  std::uint64_t next_;
};

struct Agent {
  AgentId id;
  Genotype genotype;
  Fitness fitness = 0.0;
  Energy energy = 0;
};

enum class Recombination { uniform_crossover, arithmetic_mean };

struct ProblemConfig {
  std::size_t dimension = 10;
  double domain_min = -50.0;
  double domain_max = 50.0;
  double mutation_rate = 0.1;
  double mutation_sigma = 1.0;
  Recombination recombination = Recombination::uniform_crossover;

  /// Mutation rate 1/n and sigma of one hundredth of the domain width.
  static ProblemConfig with_defaults(std::size_t dimension, double domain_min, double domain_max);

  void validate() const;
};

/// f(x) = 10n + sum(x_i^2 - 10 cos(2 pi x_i)).
Fitness rastrigin(std::span<const double> genotype);

/// Number of objective evaluations performed by this process so far.
std::uint64_t evaluation_count() noexcept;

/// Builds an agent and evaluates its fitness; the only place the objective
/// runs during a simulation.
Agent make_agent(AgentId id, Genotype genotype, Energy energy);

Genotype mutate(const Genotype& genotype, const ProblemConfig& cfg, RandomSource& rng);

std::pair<Genotype, Genotype> recombine(const Genotype& a, const Genotype& b,
                                        const ProblemConfig& cfg, RandomSource& rng);

std::vector<Agent> initial_population(std::size_t count, const ProblemConfig& cfg,
                                      Energy initial_energy, AgentIdSource& ids,
                                      RandomSource& rng);

Energy total_energy(std::span<const Agent> agents) noexcept;

std::string to_string(Recombination r);
Recombination parse_recombination(const std::string& name);

}  // namespace emas
