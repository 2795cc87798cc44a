#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "emas/arenas.hpp"
#include "emas/core.hpp"
#include "emas/ledger.hpp"
#include "emas/topology.hpp"

namespace emas {

enum class Model { sequential, hybrid, concurrent };

enum class MetricKind { fitness_sample, fight_count, reproduction_count, death_count, migration_count };

struct MetricEvent {
  double timestamp_ms = 0.0;
  IslandRef island;
  MetricKind kind = MetricKind::fitness_sample;
  double value = 0.0;
};

/// Thread-safe event buffer. Fitness samples are kept only when strictly
/// better than the emitting island's best so far; timestamps must not go
/// backwards per island, though islands may interleave freely.
class MetricSink {
 public:
  /// False if the event was dropped (sink closed, or stale timestamp).
  bool record(const MetricEvent& event);

  /// Re-samples the run-wide best at `timestamp_ms`. No-op before the first
  /// fitness sample.
  void heartbeat(double timestamp_ms);

  void close();

  std::uint64_t lost() const;
  std::uint64_t order_violations() const;
  std::vector<MetricEvent> take();

 private:
  bool accept_timestamp(IslandRef island, double timestamp_ms);

  mutable std::mutex mutex_;
  bool closed_ = false;
  std::uint64_t lost_ = 0;
  std::uint64_t order_violations_ = 0;
  std::optional<Fitness> best_;
  std::map<std::uint32_t, double> last_timestamp_;
  std::map<std::uint32_t, Fitness> island_best_;
  std::vector<MetricEvent> events_;
};

/// Clock, metric sink and ledger shared by all contexts of one run.
class RunRecorder {
 public:
  /// Logical recorders take timestamps from the caller (step index) and
  /// never read the clock.
  RunRecorder(bool logical_time, bool ledger_enabled)
      : ledger(ledger_enabled), logical_(logical_time), start_(std::chrono::steady_clock::now()) {}

  bool logical_time() const noexcept { return logical_; }

  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

  /// Records nonzero counters followed by the fitness sample, so a joined
  /// view sees the reproductions that produced an improvement.
  void emit(double timestamp_ms, IslandRef island, const MeetingCounts& counts,
            std::optional<Fitness> best);

  MetricSink metrics;
  LedgerLog ledger;

 private:
  bool logical_;
  std::chrono::steady_clock::time_point start_;
};

struct SeriesPoint {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

struct RunTrace {
  std::string run_id;
  Model model = Model::sequential;
  ConfigEcho config;
  /// Step-budget sequential runs stamp events with the step index.
  bool logical_time = false;

  std::vector<MetricEvent> events;
  std::vector<LedgerEvent> ledger;

  /// (time, best-ever fitness), non-increasing in y.
  std::vector<SeriesPoint> best_fitness_series;
  /// (time, cumulative births), non-decreasing in y.
  std::vector<SeriesPoint> reproduction_cumulative;

  MeetingCounts totals;
  double elapsed_ms = 0.0;
  Energy initial_energy = 0;
  Energy final_energy = 0;
  std::size_t final_population = 0;
  std::uint64_t lost_events = 0;
  std::uint64_t shutdown_losses = 0;

  bool conserved() const noexcept { return initial_energy == final_energy && shutdown_losses == 0; }
  std::optional<Fitness> best() const;
  double reproductions_per_second() const;

  /// Rebuilds both series from `events`.
  void finalize();
};

/// (cumulative reproductions, best-ever fitness) joined on time.
std::vector<SeriesPoint> fitness_vs_reproductions(const RunTrace& trace);

/// Reproductions spent before best-ever first reached `target`.
std::optional<double> reproductions_to_target(const RunTrace& trace, Fitness target);

struct SummaryRow {
  std::string metric;
  double bucket = 0.0;
  double mean = 0.0;
  double ci95_half_width = 0.0;
};

struct ExperimentSummary {
  Model model = Model::sequential;
  std::size_t cores = 1;
  double bucket = 0.0;
  std::size_t runs = 0;
  std::vector<SummaryRow> rows;

  /// Row for a scalar metric (final_best_fitness, reproductions_per_sec).
  const SummaryRow* find(const std::string& metric) const;
};

struct MeanCi {
  double mean = 0.0;
  double half_width = 0.0;
};

/// Normal-approximation 95% interval, 1.96 * sample sd / sqrt(N).
MeanCi mean_ci95(std::span<const double> values);

/// Mean and confidence half-width per bucket of the step-resampled series,
/// plus end-of-run scalars. Requires at least two traces sharing a model and
/// configuration (seed and run id excepted).
ExperimentSummary aggregate(std::span<const RunTrace> traces, double bucket);

/// Degenerate one-run summary with zero-width intervals.
ExperimentSummary summarize_single(const RunTrace& trace, double bucket);

void write_trace_csv(std::ostream& out, const RunTrace& trace, bool with_ledger);
void write_summary_csv(std::ostream& out, std::span<const ExperimentSummary> summaries);

std::string to_string(Model model);
Model parse_model(const std::string& name);
std::string to_string(MetricKind kind);
std::optional<MetricKind> parse_metric_kind(const std::string& name);

}  // namespace emas
