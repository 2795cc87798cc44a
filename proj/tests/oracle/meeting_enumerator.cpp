#include "meeting_enumerator.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace emas::oracle {

namespace {

struct Member {
  std::uint64_t id;
  long long energy;
  double fitness;
  std::vector<double> genotype;
};

Member member_of(const Agent& a) { return Member{a.id.value, a.energy, a.fitness, a.genotype}; }

OutcomeAgent existing(const Member& m, bool genes) {
  return OutcomeAgent{m.id, m.energy, genes ? m.genotype : std::vector<double>{}};
}

OutcomeAgent newborn(long long energy, std::vector<double> genotype, bool genes) {
  return OutcomeAgent{std::nullopt, energy, genes ? std::move(genotype) : std::vector<double>{}};
}

std::vector<std::vector<std::size_t>> permutations(std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::vector<std::size_t>> all;
  do all.push_back(order);
  while (std::next_permutation(order.begin(), order.end()));
  return all;
}

// All outcomes of pairing `group` in the given order under the fight rule.
std::vector<OutcomeAgent> fight_round(const std::vector<Member>& group,
                                      const std::vector<std::size_t>& order,
                                      const BehaviourConfig& cfg, bool genes) {
  std::vector<OutcomeAgent> out;
  std::size_t i = 0;
  for (; i + 1 < order.size(); i += 2) {
    Member a = group[order[i]];
    Member b = group[order[i + 1]];
    // the later agent of the pair loses ties
    Member& loser = (b.fitness >= a.fitness) ? b : a;
    Member& winner = (b.fitness >= a.fitness) ? a : b;
    const long long t = std::min<long long>(cfg.fight_transfer, loser.energy);
    loser.energy -= t;
    winner.energy += t;
    out.push_back(existing(a, genes));
    out.push_back(existing(b, genes));
  }
  if (i < order.size()) out.push_back(existing(group[order[i]], genes));
  return out;
}

// Children of one pair for every crossover mask.
std::vector<std::pair<std::vector<double>, std::vector<double>>> children_of(
    const std::vector<double>& a, const std::vector<double>& b, const ProblemConfig& problem) {
  std::vector<std::pair<std::vector<double>, std::vector<double>>> out;
  const std::size_t n = a.size();
  if (problem.recombination == Recombination::arithmetic_mean) {
    std::vector<double> mid(n);
    for (std::size_t k = 0; k < n; ++k) mid[k] = (a[k] + b[k]) / 2.0;
    out.emplace_back(mid, mid);
    return out;
  }
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<double> c1(n), c2(n);
    for (std::size_t k = 0; k < n; ++k) {
      const bool from_b = (mask >> k) & 1U;
      c1[k] = from_b ? b[k] : a[k];
      c2[k] = from_b ? a[k] : b[k];
    }
    out.emplace_back(std::move(c1), std::move(c2));
  }
  return out;
}

void breed(const std::vector<Member>& group, const std::vector<std::size_t>& order, std::size_t at,
           std::vector<OutcomeAgent>& acc, const BehaviourConfig& cfg, const ProblemConfig& problem,
           bool genes, std::vector<std::vector<OutcomeAgent>>& results) {
  if (at >= order.size()) {
    results.push_back(acc);
    return;
  }
  if (at + 1 == order.size()) {
    Member parent = group[order[at]];
    parent.energy -= cfg.child_energy;
    acc.push_back(existing(parent, genes));
    acc.push_back(newborn(cfg.child_energy, parent.genotype, genes));
    results.push_back(acc);
    acc.resize(acc.size() - 2);
    return;
  }
  Member a = group[order[at]];
  Member b = group[order[at + 1]];
  const long long half = cfg.child_energy / 2;
  a.energy -= half;
  b.energy -= half;
  for (auto& [c1, c2] : children_of(a.genotype, b.genotype, problem)) {
    acc.push_back(existing(a, genes));
    acc.push_back(existing(b, genes));
    acc.push_back(newborn(half, c1, genes));
    acc.push_back(newborn(half, c2, genes));
    breed(group, order, at + 2, acc, cfg, problem, genes, results);
    acc.resize(acc.size() - 4);
  }
}

Outcome sorted(Outcome o) {
  std::sort(o.begin(), o.end());
  return o;
}

}  // namespace

std::set<Outcome> enumerate_meetings(const std::vector<Agent>& population,
                                     const BehaviourConfig& behaviour,
                                     const ProblemConfig& problem, EnumerationOptions options) {
  if (population.size() > 6) throw std::invalid_argument("enumerate_meetings: at most 6 agents");
  std::vector<Member> fighters, breeders;
  for (const Agent& a : population) {
    if (a.energy == 0) continue;
    if (a.energy > behaviour.reproduction_threshold)
      breeders.push_back(member_of(a));
    else
      fighters.push_back(member_of(a));
  }

  std::set<Outcome> fight_outcomes;
  for (const auto& order : permutations(fighters.size()))
    fight_outcomes.insert(sorted(fight_round(fighters, order, behaviour, options.compare_genotypes)));

  std::set<Outcome> breed_outcomes;
  for (const auto& order : permutations(breeders.size())) {
    std::vector<OutcomeAgent> acc;
    std::vector<std::vector<OutcomeAgent>> results;
    breed(breeders, order, 0, acc, behaviour, problem, options.compare_genotypes, results);
    for (auto& r : results) breed_outcomes.insert(sorted(std::move(r)));
  }

  std::set<Outcome> all;
  for (const Outcome& f : fight_outcomes)
    for (const Outcome& r : breed_outcomes) {
      Outcome both = f;
      both.insert(both.end(), r.begin(), r.end());
      all.insert(sorted(std::move(both)));
    }
  return all;
}

Outcome canonical_outcome(const std::vector<Agent>& before, const std::vector<Agent>& after,
                          EnumerationOptions options) {
  std::set<std::uint64_t> originals;
  for (const Agent& a : before) originals.insert(a.id.value);
  Outcome o;
  for (const Agent& a : after) {
    OutcomeAgent x;
    if (originals.count(a.id.value)) x.origin = a.id.value;
    x.energy = a.energy;
    if (options.compare_genotypes) x.genotype = a.genotype;
    o.push_back(std::move(x));
  }
  return sorted(std::move(o));
}

bool outcomes_conserve_energy(const std::vector<Agent>& population, const std::set<Outcome>& outcomes) {
  long long total = 0;
  for (const Agent& a : population) total += a.energy;
  for (const Outcome& o : outcomes) {
    long long sum = 0;
    for (const OutcomeAgent& x : o) sum += x.energy;
    if (sum != total) return false;
  }
  return true;
}

}  // namespace emas::oracle
