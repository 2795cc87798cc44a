#include "emas/experiment.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <regex>
#include <sstream>
#include <thread>

#include "emas/engine_concurrent.hpp"
#include "emas/engine_hybrid.hpp"
#include "emas/engine_seq.hpp"

namespace emas {

namespace {

std::chrono::milliseconds parse_duration(const std::string& text) {
  static const std::regex pattern(R"(^\s*([0-9]+(?:\.[0-9]+)?)\s*(ms|s|m)?\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, pattern))
    throw UsageError("--duration: expected Ns, Nm or Nms, got '" + text + "'", 2);
  const double value = std::stod(m[1].str());
  const std::string unit = m[2].matched ? m[2].str() : "s";
  const double ms = unit == "ms" ? value : unit == "s" ? value * 1000.0 : value * 60'000.0;
  return std::chrono::milliseconds(static_cast<long long>(ms));
}

bool mentioned(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

}  // namespace

void ExperimentConfig::validate() const {
  run.validate();
  if (repeats < 1) throw ConfigError("repeats must be at least 1");
  if (out.empty()) throw ConfigError("an output directory is required (--out)");
  if (!(bucket_ms > 0.0)) throw ConfigError("bucket-ms must be positive");
  const bool concurrent = std::find(models.begin(), models.end(), Model::concurrent) != models.end();
  if (concurrent && run.step_budget())
    throw ConfigError("the concurrent model runs on wall-clock time; use --duration, not --steps");
}

ExperimentConfig parse_config(const std::vector<std::string>& args) {
  ExperimentConfig cfg;
  RunConfig& run = cfg.run;

  std::string model = "all";
  std::size_t dimension = 10;
  double domain_min = -50.0;
  double domain_max = 50.0;
  std::optional<double> mutation_rate;
  std::optional<double> mutation_sigma;
  std::string recombination = "uniform_crossover";
  std::string topology = "fully_connected";
  std::string duration = "60s";
  std::optional<std::uint64_t> steps;
  std::string out = cfg.out.string();
  std::size_t units = std::max(1u, std::thread::hardware_concurrency());
  long long flush_ms = run.flush_timeout.count();

  CLI::App app{"Evolutionary multi-agent optimization with energy-based selection", "emas"};
  app.set_config("--config", "", "Flat key=value file; flags override its values");
  app.allow_config_extras(false);
  app.add_option("--model", model, "sequential, hybrid, concurrent or all")
      ->check(CLI::IsMember({"sequential", "hybrid", "concurrent", "all"}))
      ->capture_default_str();
  app.add_option("--dimension", dimension, "Problem dimension")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--domain-min", domain_min, "Lower bound of every coordinate")->capture_default_str();
  app.add_option("--domain-max", domain_max, "Upper bound of every coordinate")->capture_default_str();
  app.add_option("--mutation-rate", mutation_rate, "Per-gene mutation probability (default 1/dimension)")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--mutation-sigma", mutation_sigma, "Gaussian step (default domain width / 100)");
  app.add_option("--recombination", recombination, "uniform_crossover or arithmetic_mean")
      ->check(CLI::IsMember({"uniform_crossover", "arithmetic_mean"}))
      ->capture_default_str();
  app.add_option("--islands", run.islands, "Number of islands")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--population", run.population_per_island, "Initial agents per island")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--duration", duration, "Wall-clock budget per run: Ns, Nm or Nms")->capture_default_str();
  app.add_option("--steps", steps, "Step budget per run instead of a duration");
  app.add_option("--repeats", cfg.repeats, "Runs per model")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--seed", run.seed, "Master seed; repeat i uses seed + i")->capture_default_str();
  app.add_option("--units", units, "Worker threads for hybrid and concurrent")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--migration-prob", run.behaviour.migration_probability, "Per-decision migration probability")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app.add_option("--topology", topology, "fully_connected or ring")
      ->check(CLI::IsMember({"fully_connected", "ring"}))
      ->capture_default_str();
  app.add_option("--reproduction-threshold", run.behaviour.reproduction_threshold)->capture_default_str();
  app.add_option("--fight-transfer", run.behaviour.fight_transfer)->capture_default_str();
  app.add_option("--child-energy", run.behaviour.child_energy)->capture_default_str();
  app.add_option("--initial-energy", run.behaviour.initial_energy)->capture_default_str();
  app.add_option("--flush-timeout-ms", flush_ms, "Lone-agent wait in pairwise arenas")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--bucket-ms", cfg.bucket_ms, "Summary resampling bucket")->capture_default_str();
  app.add_option("--out", out, "Output directory")->capture_default_str();
  app.add_flag("--ledger", run.ledger, "Append per-event energy records to trace files");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw UsageError(app.help(), 0);
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what(), e.get_exit_code() == 0 ? 2 : e.get_exit_code());
  }

  const bool cli_steps = mentioned(args, "--steps");
  const bool cli_duration = mentioned(args, "--duration");
  if (cli_steps && cli_duration) throw UsageError("--duration and --steps are mutually exclusive", 2);
  if (!cli_steps && !cli_duration && steps && app.count("--duration") > 0)
    throw UsageError("config file sets both duration and steps", 2);

  try {
    if (model == "all")
      cfg.models = {Model::sequential, Model::hybrid, Model::concurrent};
    else
      cfg.models = {parse_model(model)};
    run.problem = ProblemConfig::with_defaults(dimension, domain_min, domain_max);
    if (mutation_rate) run.problem.mutation_rate = *mutation_rate;
    if (mutation_sigma) run.problem.mutation_sigma = *mutation_sigma;
    run.problem.recombination = parse_recombination(recombination);
    run.topology = parse_topology(topology);
    if (steps && !cli_duration)
      run.budget = StepBudget{*steps};
    else
      run.budget = parse_duration(duration);
    run.units = units;
    run.flush_timeout = std::chrono::milliseconds(flush_ms);
    cfg.out = out;
    cfg.validate();
  } catch (const UsageError&) {
    throw;
  } catch (const ConfigError& e) {
    throw UsageError(e.what(), 2);
  }
  return cfg;
}

RunTrace run_model(Model model, const RunConfig& cfg) {
  switch (model) {
    case Model::sequential: return run_sequential(cfg);
    case Model::hybrid: return run_hybrid(cfg);
    case Model::concurrent: return run_concurrent(cfg);
  }
  throw ConfigError("unknown model");
}

std::vector<std::string> check_trace(const RunTrace& trace) {
  std::vector<std::string> problems;
  if (trace.initial_energy != trace.final_energy)
    problems.push_back("energy " + std::to_string(trace.initial_energy) + " -> " +
                       std::to_string(trace.final_energy));
  if (trace.shutdown_losses != 0)
    problems.push_back(std::to_string(trace.shutdown_losses) + " agents lost at shutdown");
  if (trace.lost_events != 0) problems.push_back(std::to_string(trace.lost_events) + " metric events lost");
  const auto& f = trace.best_fitness_series;
  for (std::size_t i = 1; i < f.size(); ++i)
    if (f[i].y > f[i - 1].y || f[i].x < f[i - 1].x) {
      problems.push_back("best-fitness series not monotone");
      break;
    }
  const auto& r = trace.reproduction_cumulative;
  for (std::size_t i = 1; i < r.size(); ++i)
    if (r[i].y < r[i - 1].y || r[i].x < r[i - 1].x) {
      problems.push_back("reproduction series not monotone");
      break;
    }
  return problems;
}

namespace {

std::string pm(const SummaryRow* row, int precision) {
  if (!row) return "-";
  std::ostringstream s;
  s << std::setprecision(precision) << row->mean << " +- " << row->ci95_half_width;
  return s.str();
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, std::ostream& report) {
  cfg.validate();
  std::error_code ec;
  std::filesystem::create_directories(cfg.out, ec);
  const auto probe = cfg.out / ".emas-write-test";
  if (std::ofstream test(probe); !test) {
    report << "error: output directory " << cfg.out << " is not writable\n";
    return 3;
  }
  std::filesystem::remove(probe, ec);

  bool clean = true;
  std::vector<ExperimentSummary> summaries;
  for (Model model : cfg.models) {
    std::vector<RunTrace> traces;
    for (std::size_t r = 0; r < cfg.repeats; ++r) {
      RunConfig run = cfg.run;
      run.seed = cfg.run.seed + r;
      run.run_id = to_string(model) + "-" + std::to_string(r);
      RunTrace trace = run_model(model, run);
      for (const std::string& p : check_trace(trace)) {
        report << "check failed [" << trace.run_id << "]: " << p << '\n';
        clean = false;
      }
      const auto path = cfg.out / (run.run_id + ".csv");
      std::ofstream file(path, std::ios::binary);
      write_trace_csv(file, trace, run.ledger);
      if (!file) {
        report << "error: failed writing " << path << '\n';
        return 3;
      }
      traces.push_back(std::move(trace));
    }
    summaries.push_back(traces.size() >= 2 ? aggregate(traces, cfg.bucket_ms)
                                           : summarize_single(traces.front(), cfg.bucket_ms));
  }

  std::ofstream summary(cfg.out / "summary.csv", std::ios::binary);
  write_summary_csv(summary, summaries);

  report << std::left << std::setw(12) << "model" << std::setw(7) << "runs" << std::setw(7) << "cores"
         << std::setw(34) << "final best fitness (95% CI)" << "reproductions/s (95% CI)\n";
  for (const ExperimentSummary& s : summaries)
    report << std::left << std::setw(12) << to_string(s.model) << std::setw(7) << s.runs << std::setw(7)
           << s.cores << std::setw(34) << pm(s.find("final_best_fitness"), 6)
           << pm(s.find("reproductions_per_sec"), 6) << '\n';
  return clean && summary ? 0 : 1;
}

}  // namespace emas
