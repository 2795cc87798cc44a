#include "emas/core.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <numbers>
#include <numeric>

namespace emas {

namespace {
std::atomic<std::uint64_t> g_evaluations{0};

double clamp_to_domain(double x, const ProblemConfig& cfg) {
  return std::clamp(x, cfg.domain_min, cfg.domain_max);
}
}  // namespace

ProblemConfig ProblemConfig::with_defaults(std::size_t dimension, double domain_min,
                                           double domain_max) {
  ProblemConfig cfg;
  cfg.dimension = dimension;
  cfg.domain_min = domain_min;
  cfg.domain_max = domain_max;
  cfg.mutation_rate = dimension > 0 ? 1.0 / static_cast<double>(dimension) : 1.0;
  cfg.mutation_sigma = (domain_max - domain_min) / 100.0;
  return cfg;
}

void ProblemConfig::validate() const {
  if (dimension < 1) throw ConfigError("dimension must be at least 1");
  if (!(domain_min < domain_max)) throw ConfigError("domain-min must be below domain-max");
  if (!std::isfinite(domain_min) || !std::isfinite(domain_max))
    throw ConfigError("domain bounds must be finite");
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0))
    throw ConfigError("mutation-rate must lie in [0, 1]");
  if (!(mutation_sigma > 0.0) || !std::isfinite(mutation_sigma))
    throw ConfigError("mutation-sigma must be positive");
}

Fitness rastrigin(std::span<const double> genotype) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double sum = 10.0 * static_cast<double>(genotype.size());
  for (double x : genotype) sum += x * x - 10.0 * std::cos(two_pi * x);
  // cos rounding can leave a tiny negative residue near the optimum
  return sum < 0.0 ? 0.0 : sum;
}

std::uint64_t evaluation_count() noexcept {
  return g_evaluations.load(std::memory_order_relaxed);
}

Agent make_agent(AgentId id, Genotype genotype, Energy energy) {
  g_evaluations.fetch_add(1, std::memory_order_relaxed);
  const Fitness f = rastrigin(genotype);
  assert(std::isfinite(f));
  return Agent{id, std::move(genotype), f, energy};
}

Genotype mutate(const Genotype& genotype, const ProblemConfig& cfg, RandomSource& rng) {
  Genotype out = genotype;
  if (cfg.mutation_rate <= 0.0) return out;
  for (double& x : out) {
    if (rng.bernoulli(cfg.mutation_rate))
      x = clamp_to_domain(x + rng.normal(0.0, cfg.mutation_sigma), cfg);
  }
  return out;
}

std::pair<Genotype, Genotype> recombine(const Genotype& a, const Genotype& b,
                                        const ProblemConfig& cfg, RandomSource& rng) {
  if (a.size() != b.size())
    throw ConfigError("recombine: parent genotypes differ in length");
  Genotype first(a.size());
  Genotype second(a.size());
  switch (cfg.recombination) {
    case Recombination::uniform_crossover:
      for (std::size_t i = 0; i < a.size(); ++i) {
        const bool swap = rng.bernoulli(0.5);
        first[i] = swap ? b[i] : a[i];
        second[i] = swap ? a[i] : b[i];
      }
      break;
    case Recombination::arithmetic_mean:
      for (std::size_t i = 0; i < a.size(); ++i) {
        first[i] = clamp_to_domain(0.5 * (a[i] + b[i]), cfg);
        second[i] = first[i];
      }
      break;
  }
  return {std::move(first), std::move(second)};
}

std::vector<Agent> initial_population(std::size_t count, const ProblemConfig& cfg,
                                      Energy initial_energy, AgentIdSource& ids,
                                      RandomSource& rng) {
  std::vector<Agent> agents;
  agents.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Genotype g(cfg.dimension);
    for (double& x : g) x = rng.uniform(cfg.domain_min, cfg.domain_max);
    agents.push_back(make_agent(ids.next(), std::move(g), initial_energy));
  }
  return agents;
}

Energy total_energy(std::span<const Agent> agents) noexcept {
  return std::accumulate(agents.begin(), agents.end(), Energy{0},
                         [](Energy acc, const Agent& a) { return acc + a.energy; });
}

std::string to_string(Recombination r) {
  return r == Recombination::uniform_crossover ? "uniform_crossover" : "arithmetic_mean";
}

Recombination parse_recombination(const std::string& name) {
  if (name == "uniform_crossover") return Recombination::uniform_crossover;
  if (name == "arithmetic_mean") return Recombination::arithmetic_mean;
  throw ConfigError("unknown recombination: " + name);
}

}  // namespace emas
