#include "emas/run_config.hpp"

#include <array>
#include <charconv>

namespace emas {

void RunConfig::validate() const {
  problem.validate();
  behaviour.validate();
  if (islands < 1) throw ConfigError("islands must be at least 1");
  if (islands > 0xfffe) throw ConfigError("too many islands");
  if (population_per_island < 1) throw ConfigError("population must be at least 1");
  if (units < 1) throw ConfigError("units must be at least 1");
  if (flush_timeout.count() < 1) throw ConfigError("flush-timeout-ms must be positive");
  if (heartbeat.count() < 1) throw ConfigError("heartbeat must be positive");
  if (const auto* d = std::get_if<std::chrono::milliseconds>(&budget); d && d->count() < 0)
    throw ConfigError("duration must not be negative");
}

std::string format_duration(std::chrono::milliseconds d) {
  const auto ms = d.count();
  if (ms % 60'000 == 0 && ms != 0) return std::to_string(ms / 60'000) + "m";
  if (ms % 1000 == 0) return std::to_string(ms / 1000) + "s";
  return std::to_string(ms) + "ms";
}

namespace {
std::string num(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}
}  // namespace

ConfigEcho describe(const RunConfig& cfg, Model model) {
  ConfigEcho echo;
  echo.emplace_back("model", to_string(model));
  echo.emplace_back("dimension", std::to_string(cfg.problem.dimension));
  echo.emplace_back("domain-min", num(cfg.problem.domain_min));
  echo.emplace_back("domain-max", num(cfg.problem.domain_max));
  echo.emplace_back("mutation-rate", num(cfg.problem.mutation_rate));
  echo.emplace_back("mutation-sigma", num(cfg.problem.mutation_sigma));
  echo.emplace_back("recombination", to_string(cfg.problem.recombination));
  echo.emplace_back("islands", std::to_string(cfg.islands));
  echo.emplace_back("population", std::to_string(cfg.population_per_island));
  echo.emplace_back("topology", to_string(cfg.topology));
  echo.emplace_back("migration-prob", num(cfg.behaviour.migration_probability));
  echo.emplace_back("reproduction-threshold", std::to_string(cfg.behaviour.reproduction_threshold));
  echo.emplace_back("fight-transfer", std::to_string(cfg.behaviour.fight_transfer));
  echo.emplace_back("child-energy", std::to_string(cfg.behaviour.child_energy));
  echo.emplace_back("initial-energy", std::to_string(cfg.behaviour.initial_energy));
  if (const auto* s = std::get_if<StepBudget>(&cfg.budget))
    echo.emplace_back("steps", std::to_string(s->steps));
  else
    echo.emplace_back("duration", format_duration(std::get<std::chrono::milliseconds>(cfg.budget)));
  echo.emplace_back("seed", std::to_string(cfg.seed));
  echo.emplace_back("units", std::to_string(cfg.units));
  echo.emplace_back("flush-timeout-ms", std::to_string(cfg.flush_timeout.count()));
  return echo;
}

}  // namespace emas
