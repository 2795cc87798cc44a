#include "emas/metrics.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace emas {

bool MetricSink::accept_timestamp(IslandRef island, double timestamp_ms) {
  auto [it, inserted] = last_timestamp_.try_emplace(island.index, timestamp_ms);
  if (inserted) return timestamp_ms >= 0.0;
  if (timestamp_ms < it->second) return false;
  it->second = timestamp_ms;
  return true;
}

bool MetricSink::record(const MetricEvent& event) {
  std::lock_guard lock(mutex_);
  if (closed_) {
    ++lost_;
    return false;
  }
  if (!accept_timestamp(event.island, event.timestamp_ms)) {
    ++order_violations_;
    return false;
  }
  if (event.kind == MetricKind::fitness_sample) {
    auto [it, inserted] = island_best_.try_emplace(event.island.index, event.value);
    if (!inserted) {
      if (!(event.value < it->second)) return false;
      it->second = event.value;
    }
    if (!best_ || event.value < *best_) best_ = event.value;
  }
  events_.push_back(event);
  return true;
}

void MetricSink::heartbeat(double timestamp_ms) {
  std::lock_guard lock(mutex_);
  if (closed_ || !best_) return;
  if (!accept_timestamp(IslandRef::all(), timestamp_ms)) {
    ++order_violations_;
    return;
  }
  events_.push_back(MetricEvent{timestamp_ms, IslandRef::all(), MetricKind::fitness_sample, *best_});
}

void MetricSink::close() {
  std::lock_guard lock(mutex_);
  closed_ = true;
}

std::uint64_t MetricSink::lost() const {
  std::lock_guard lock(mutex_);
  return lost_;
}

std::uint64_t MetricSink::order_violations() const {
  std::lock_guard lock(mutex_);
  return order_violations_;
}

std::vector<MetricEvent> MetricSink::take() {
  std::lock_guard lock(mutex_);
  return std::move(events_);
}

void RunRecorder::emit(double timestamp_ms, IslandRef island, const MeetingCounts& counts,
                       std::optional<Fitness> best) {
  const std::array<std::pair<MetricKind, std::uint64_t>, 4> items = {{
      {MetricKind::fight_count, counts.fights},
      {MetricKind::reproduction_count, counts.births},
      {MetricKind::death_count, counts.deaths},
      {MetricKind::migration_count, counts.migrations},
  }};
  for (const auto& [kind, n] : items)
    if (n > 0) metrics.record(MetricEvent{timestamp_ms, island, kind, static_cast<double>(n)});
  if (best) metrics.record(MetricEvent{timestamp_ms, island, MetricKind::fitness_sample, *best});
}

std::optional<Fitness> RunTrace::best() const {
  if (best_fitness_series.empty()) return std::nullopt;
  return best_fitness_series.back().y;
}

double RunTrace::reproductions_per_second() const {
  if (elapsed_ms <= 0.0) return 0.0;
  return static_cast<double>(totals.births) / (elapsed_ms / 1000.0);
}

void RunTrace::finalize() {
  struct Sample {
    double t;
    double value;
    bool heartbeat;
  };
  std::vector<Sample> samples;
  std::vector<std::pair<double, double>> births;
  for (const MetricEvent& e : events) {
    if (e.kind == MetricKind::fitness_sample)
      samples.push_back({e.timestamp_ms, e.value, e.island.is_all()});
    else if (e.kind == MetricKind::reproduction_count)
      births.emplace_back(e.timestamp_ms, e.value);
  }
  std::stable_sort(samples.begin(), samples.end(),
                   [](const Sample& a, const Sample& b) { return a.t < b.t; });
  std::stable_sort(births.begin(), births.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  best_fitness_series.clear();
  std::optional<double> best_so_far;
  for (const Sample& s : samples) {
    if (!best_so_far || s.value < *best_so_far) {
      best_so_far = s.value;
      if (!best_fitness_series.empty() && best_fitness_series.back().x == s.t)
        best_fitness_series.back().y = s.value;
      else
        best_fitness_series.push_back({s.t, s.value});
    } else if (s.heartbeat) {
      best_fitness_series.push_back({s.t, *best_so_far});
    }
  }

  reproduction_cumulative.clear();
  double cumulative = 0.0;
  for (const auto& [t, n] : births) {
    cumulative += n;
    reproduction_cumulative.push_back({t, cumulative});
  }
}

std::vector<SeriesPoint> fitness_vs_reproductions(const RunTrace& trace) {
  std::vector<SeriesPoint> out;
  const auto& births = trace.reproduction_cumulative;
  std::size_t j = 0;
  double cumulative = 0.0;
  for (const SeriesPoint& p : trace.best_fitness_series) {
    while (j < births.size() && births[j].x <= p.x) cumulative = births[j++].y;
    out.push_back({cumulative, p.y});
  }
  return out;
}

std::optional<double> reproductions_to_target(const RunTrace& trace, Fitness target) {
  for (const SeriesPoint& p : fitness_vs_reproductions(trace))
    if (p.y <= target) return p.x;
  return std::nullopt;
}

const SummaryRow* ExperimentSummary::find(const std::string& metric) const {
  for (const SummaryRow& r : rows)
    if (r.metric == metric) return &r;
  return nullptr;
}

MeanCi mean_ci95(std::span<const double> values) {
  if (values.empty()) return {};
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  return {mean, 1.96 * sd / std::sqrt(n)};
}

namespace {

double trace_end(const RunTrace& t) {
  double end = t.logical_time ? 0.0 : t.elapsed_ms;
  for (const MetricEvent& e : t.events) end = std::max(end, e.timestamp_ms);
  return end;
}

// Step function: last value at or before `at`; before the first point the
// first value is carried backwards.
double value_at(const std::vector<SeriesPoint>& series, double at, double empty_value) {
  if (series.empty()) return empty_value;
  auto it = std::upper_bound(series.begin(), series.end(), at,
                             [](double t, const SeriesPoint& p) { return t < p.x; });
  if (it == series.begin()) return series.front().y;
  return std::prev(it)->y;
}

ConfigEcho comparable(const ConfigEcho& c) {
  ConfigEcho out;
  for (const auto& kv : c)
    if (kv.first != "seed" && kv.first != "run-id") out.push_back(kv);
  return out;
}

std::size_t cores_of(const RunTrace& t) {
  for (const auto& [k, v] : t.config)
    if (k == "units") return static_cast<std::size_t>(std::stoull(v));
  return 1;
}

ExperimentSummary summarize(std::span<const RunTrace> traces, double bucket) {
  if (!(bucket > 0.0)) throw std::invalid_argument("aggregate: bucket must be positive");
  ExperimentSummary s;
  s.model = traces.front().model;
  s.cores = cores_of(traces.front());
  s.bucket = bucket;
  s.runs = traces.size();

  double horizon = 0.0;
  for (const RunTrace& t : traces) horizon = std::max(horizon, trace_end(t));
  const auto buckets = static_cast<std::size_t>(std::floor(horizon / bucket));

  std::vector<double> values(traces.size());
  for (std::size_t k = 0; k <= buckets; ++k) {
    const double at = static_cast<double>(k) * bucket;
    for (std::size_t i = 0; i < traces.size(); ++i)
      values[i] = value_at(traces[i].best_fitness_series, at, std::nan(""));
    auto ci = mean_ci95(values);
    s.rows.push_back({"best_fitness", at, ci.mean, ci.half_width});
    for (std::size_t i = 0; i < traces.size(); ++i) {
      const auto& rc = traces[i].reproduction_cumulative;
      values[i] = rc.empty() || at < rc.front().x ? 0.0 : value_at(rc, at, 0.0);
    }
    ci = mean_ci95(values);
    s.rows.push_back({"reproductions", at, ci.mean, ci.half_width});
  }

  for (std::size_t i = 0; i < traces.size(); ++i)
    values[i] = traces[i].best().value_or(std::nan(""));
  auto ci = mean_ci95(values);
  s.rows.push_back({"final_best_fitness", horizon, ci.mean, ci.half_width});
  for (std::size_t i = 0; i < traces.size(); ++i)
    values[i] = traces[i].reproductions_per_second();
  ci = mean_ci95(values);
  s.rows.push_back({"reproductions_per_sec", horizon, ci.mean, ci.half_width});
  return s;
}

}  // namespace

ExperimentSummary aggregate(std::span<const RunTrace> traces, double bucket) {
  if (traces.size() < 2) throw std::invalid_argument("aggregate: needs at least two runs");
  const auto reference = comparable(traces.front().config);
  for (const RunTrace& t : traces) {
    if (t.model != traces.front().model || comparable(t.config) != reference)
      throw std::invalid_argument("aggregate: runs differ in model or configuration");
  }
  return summarize(traces, bucket);
}

ExperimentSummary summarize_single(const RunTrace& trace, double bucket) {
  return summarize(std::span<const RunTrace>(&trace, 1), bucket);
}

namespace {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

std::string format_time(double t, bool logical) {
  std::array<char, 64> buf{};
  auto [end, ec] = logical
                       ? std::to_chars(buf.data(), buf.data() + buf.size(),
                                       static_cast<long long>(std::llround(t)))
                       : std::to_chars(buf.data(), buf.data() + buf.size(), t,
                                       std::chars_format::fixed, 3);
  return std::string(buf.data(), end);
}

std::string format_island(IslandRef island) {
  return island.is_all() ? "all" : std::to_string(island.index);
}

}  // namespace

void write_trace_csv(std::ostream& out, const RunTrace& trace, bool with_ledger) {
  out << "# emas trace\n";
  out << "# fitness values are raw objective values; apply any log-scale offset "
         "(e.g. 1e-16) at plot time\n";
  out << "# time unit: " << (trace.logical_time ? "step" : "ms") << '\n';
  for (const auto& [k, v] : trace.config) out << "# config " << k << '=' << v << '\n';
  out << "run_id,model,island,timestamp_ms,kind,value";
  if (with_ledger) out << ",agent,other,energy_delta";
  out << '\n';

  const std::string prefix = trace.run_id + ',' + to_string(trace.model) + ',';
  for (const MetricEvent& e : trace.events) {
    out << prefix << format_island(e.island) << ',' << format_time(e.timestamp_ms, trace.logical_time)
        << ',' << to_string(e.kind) << ',' << format_number(e.value);
    if (with_ledger) out << ",,,";
    out << '\n';
  }
  if (!with_ledger) return;
  for (const LedgerEvent& e : trace.ledger) {
    out << prefix << format_island(e.island) << ',' << format_time(e.timestamp_ms, trace.logical_time)
        << ',' << to_string(e.entry.kind) << ",," << e.entry.agent.value << ',' << e.entry.other
        << ',' << e.entry.amount << '\n';
  }
}

void write_summary_csv(std::ostream& out, std::span<const ExperimentSummary> summaries) {
  out << "model,cores,bucket_ms,metric,mean,ci95_half_width\n";
  for (const ExperimentSummary& s : summaries)
    for (const SummaryRow& r : s.rows)
      out << to_string(s.model) << ',' << s.cores << ',' << format_number(r.bucket) << ','
          << r.metric << ',' << format_number(r.mean) << ',' << format_number(r.ci95_half_width)
          << '\n';
}

std::string to_string(Model model) {
  switch (model) {
    case Model::sequential: return "sequential";
    case Model::hybrid: return "hybrid";
    case Model::concurrent: return "concurrent";
  }
  return "unknown";
}

Model parse_model(const std::string& name) {
  if (name == "sequential") return Model::sequential;
  if (name == "hybrid") return Model::hybrid;
  if (name == "concurrent") return Model::concurrent;
  throw ConfigError("unknown model: " + name);
}

std::string to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::fitness_sample: return "fitness_sample";
    case MetricKind::fight_count: return "fight_count";
    case MetricKind::reproduction_count: return "reproduction_count";
    case MetricKind::death_count: return "death_count";
    case MetricKind::migration_count: return "migration_count";
  }
  return "unknown";
}

std::optional<MetricKind> parse_metric_kind(const std::string& name) {
  for (MetricKind k : {MetricKind::fitness_sample, MetricKind::fight_count,
                       MetricKind::reproduction_count, MetricKind::death_count,
                       MetricKind::migration_count})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

}  // namespace emas
