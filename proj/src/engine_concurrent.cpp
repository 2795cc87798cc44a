#include "emas/engine_concurrent.hpp"

#include <array>
#include <atomic>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <variant>

#include "emas/engine_seq.hpp"
#include "emas/runtime/scheduler.hpp"

namespace emas {

namespace {

using runtime::WorkerContext;

class ArenaActor;
class Collector;
struct Shared;

struct IslandArenas {
  IslandRef ref;
  std::array<ArenaActor*, kArenaKinds.size()> arenas{};
  ArenaActor& operator[](ArenaKind k) const { return *arenas[static_cast<std::size_t>(k)]; }
};

/// An agent between meetings. Whoever holds the unique_ptr owns the agent:
/// the run queue while it decides, then an arena until it is replied to.
struct AgentTask final : runtime::Runnable {
  AgentTask(Shared& s, Agent a, const IslandArenas* home) : shared(s), agent(std::move(a)), arenas(home) {}
  void run(WorkerContext& ctx) override;

  Shared& shared;
  Agent agent;
  const IslandArenas* arenas;
};

struct Flush {
  std::uint64_t generation;
};
struct Stop {};
using ArenaMessage = std::variant<std::unique_ptr<AgentTask>, Flush, Stop>;

struct MetricBatch {
  IslandRef island;
  MeetingCounts counts;
  std::optional<Fitness> best;
};
struct Heartbeat {};
struct Sync {};
using CollectorMessage = std::variant<MetricBatch, Heartbeat, Sync>;

struct Shared {
  Shared(const RunConfig& c, const Topology& t, RunRecorder& r, runtime::Scheduler& s,
         runtime::TimerService& ts)
      : cfg(c), topology(t), recorder(r), scheduler(s), timers(ts) {}

  const RunConfig& cfg;
  const Topology& topology;
  RunRecorder& recorder;
  runtime::Scheduler& scheduler;
  runtime::TimerService& timers;
  std::vector<IslandArenas> islands;
  Collector* collector = nullptr;

  std::mutex mutex;
  std::condition_variable changed;
  std::int64_t alive = 0;
  std::size_t arenas_stopped = 0;
  bool synced = false;
  std::vector<std::pair<IslandRef, Agent>> survivors;

  void spawned(std::int64_t n) {
    std::lock_guard lock(mutex);
    alive += n;
  }
  void died() {
    {
      std::lock_guard lock(mutex);
      --alive;
    }
    changed.notify_all();
  }
  void collect(IslandRef island, Agent agent) {
    recorder.ledger.append(recorder.elapsed_ms(), island,
                           LedgerEntry{LedgerKind::final, agent.id, 0, agent.energy});
    {
      std::lock_guard lock(mutex);
      survivors.emplace_back(island, std::move(agent));
      --alive;
    }
    changed.notify_all();
  }
};

/// Serializes metric traffic into the run's sink; the only context that
/// touches it while the run is live.
class Collector final : public runtime::Actor<CollectorMessage> {
 public:
  Collector(Shared& shared) : Actor(shared.scheduler), shared_(shared) {}

 protected:
  bool handle(CollectorMessage message, WorkerContext&) override {
    RunRecorder& rec = shared_.recorder;
    if (auto* b = std::get_if<MetricBatch>(&message)) {
      rec.emit(rec.elapsed_ms(), b->island, b->counts, b->best);
    } else if (std::holds_alternative<Heartbeat>(message)) {
      rec.metrics.heartbeat(rec.elapsed_ms());
    } else {
      {
        std::lock_guard lock(shared_.mutex);
        shared_.synced = true;
      }
      shared_.changed.notify_all();
    }
    return false;
  }

 private:
  Shared& shared_;
};

class ArenaActor final : public runtime::Actor<ArenaMessage> {
 public:
  static constexpr std::uint64_t kFlushEvery = 64;

  ArenaActor(Shared& shared, ArenaKind kind, IslandRef island)
      : Actor(shared.scheduler),
        shared_(shared),
        kind_(kind),
        island_(island),
        ids_(static_cast<std::uint16_t>(island.index + 1)) {}

  std::size_t capacity() const noexcept {
    return kind_ == ArenaKind::fight || kind_ == ArenaKind::reproduction ? 2 : 1;
  }
  const MeetingCounts& totals() const noexcept { return totals_; }

 protected:
  bool handle(ArenaMessage message, WorkerContext& ctx) override {
    return std::visit([&](auto& m) { return on(m, ctx); }, message);
  }

 private:
  bool on(std::unique_ptr<AgentTask>& task, WorkerContext& ctx) {
    if (stopped_) {
      shared_.collect(island_, std::move(task->agent));
      return false;
    }
    switch (kind_) {
      case ArenaKind::death: {
        std::vector<Agent> group;
        group.push_back(std::move(task->agent));
        log(death_meeting(std::move(group)));
        unflushed_.deaths += 1;
        task.reset();
        shared_.died();
        break;
      }
      case ArenaKind::migration: {
        std::vector<Agent> group;
        group.push_back(std::move(task->agent));
        MeetingResult r = migration_meeting(std::move(group), island_, shared_.topology, ctx.rng);
        log(r);
        if (!r.emigrants.empty()) {
          task->agent = std::move(r.emigrants.front().agent);
          task->arenas = &shared_.islands.at(r.emigrants.front().destination.index);
          unflushed_.migrations += 1;
        } else {
          task->agent = std::move(r.survivors.front());
        }
        shared_.scheduler.post(task.release());
        break;
      }
      case ArenaKind::fight:
      case ArenaKind::reproduction:
        pending_.push_back(std::move(task));
        if (pending_.size() < capacity()) {
          arm_flush_timer();
          return false;
        }
        meet(ctx);
        break;
    }
    count_meeting();
    return true;
  }

  bool on(Flush& flush, WorkerContext& ctx) {
    if (stopped_ || flush.generation != generation_ || pending_.size() != 1) return false;
    meet(ctx);
    count_meeting();
    return true;
  }

  bool on(Stop&, WorkerContext&) {
    stopped_ = true;
    ++generation_;
    for (auto& task : pending_) shared_.collect(island_, std::move(task->agent));
    pending_.clear();
    flush_metrics();
    {
      std::lock_guard lock(shared_.mutex);
      ++shared_.arenas_stopped;
    }
    shared_.changed.notify_all();
    return false;
  }

  void arm_flush_timer() {
    const std::uint64_t g = ++generation_;
    shared_.timers.schedule(runtime::TimerService::Clock::now() + shared_.cfg.flush_timeout,
                            [this, g] { send(Flush{g}); });
  }

  // Meets whatever is pending: a full pair, or a lone agent after a timeout.
  void meet(WorkerContext& ctx) {
    ++generation_;
    auto tasks = std::move(pending_);
    pending_.clear();
    const auto& cfg = shared_.cfg;

    if (kind_ == ArenaKind::fight) {
      if (tasks.size() == 2) {
        MeetingResult r =
            fight_meeting(std::move(tasks[0]->agent), std::move(tasks[1]->agent), cfg.behaviour);
        log(r);
        for (std::size_t i = 0; i < 2; ++i) tasks[i]->agent = std::move(r.survivors[i]);
        unflushed_.fights += 1;
      }
      for (auto& t : tasks) shared_.scheduler.post(t.release());
      return;
    }

    std::vector<Agent> parents;
    for (auto& t : tasks) parents.push_back(std::move(t->agent));
    MeetingResult r = reproduction_meeting(std::move(parents), cfg.behaviour, cfg.problem, ids_, ctx.rng);
    log(r);
    for (std::size_t i = 0; i < tasks.size(); ++i) tasks[i]->agent = std::move(r.survivors[i]);

    const IslandArenas* home = &shared_.islands.at(island_.index);
    std::vector<std::unique_ptr<AgentTask>> children;
    for (const Agent& child : r.newborns()) {
      if (!best_ || child.fitness < *best_) {
        best_ = child.fitness;
        improved_ = true;
      }
    }
    for (std::size_t i = tasks.size(); i < r.survivors.size(); ++i)
      children.push_back(std::make_unique<AgentTask>(shared_, std::move(r.survivors[i]), home));
    unflushed_.births += children.size();
    shared_.spawned(static_cast<std::int64_t>(children.size()));
    for (auto& t : tasks) shared_.scheduler.post(t.release());
    for (auto& c : children) shared_.scheduler.post(c.release());
  }

  void log(const MeetingResult& r) {
    if (shared_.recorder.ledger.enabled())
      shared_.recorder.ledger.append_all(shared_.recorder.elapsed_ms(), island_, r.ledger);
  }

  void count_meeting() {
    if (improved_ || ++since_flush_ >= kFlushEvery) flush_metrics();
  }

  void flush_metrics() {
    totals_ += unflushed_;
    std::optional<Fitness> best;
    if (improved_) best = best_;
    if (best || unflushed_.fights || unflushed_.births || unflushed_.deaths || unflushed_.migrations)
      shared_.collector->send(MetricBatch{island_, unflushed_, best});
    unflushed_ = {};
    improved_ = false;
    since_flush_ = 0;
  }

  Shared& shared_;
  ArenaKind kind_;
  IslandRef island_;
  AgentIdSource ids_;
  std::vector<std::unique_ptr<AgentTask>> pending_;
  std::uint64_t generation_ = 0;
  bool stopped_ = false;
  MeetingCounts unflushed_;
  MeetingCounts totals_;
  std::uint64_t since_flush_ = 0;
  std::optional<Fitness> best_;
  bool improved_ = false;
};

void AgentTask::run(WorkerContext& ctx) {
  std::unique_ptr<AgentTask> self(this);
  const ArenaKind kind = behaviour(agent, shared.cfg.behaviour, ctx.rng);
  (*arenas)[kind].send(std::move(self));
}

}  // namespace

RunTrace run_concurrent(const RunConfig& cfg) {
  cfg.validate();
  const auto* duration = std::get_if<std::chrono::milliseconds>(&cfg.budget);
  if (!duration) throw ConfigError("the concurrent model needs a wall-clock duration budget");

  RunRecorder rec(false, cfg.ledger);
  const Topology topology = Topology::make(cfg.topology, cfg.islands);

  RunTrace trace;
  trace.run_id = cfg.run_id;
  trace.model = Model::concurrent;
  trace.config = describe(cfg, Model::concurrent);

  runtime::TimerService timers;
  runtime::Scheduler scheduler(cfg.units, cfg.seed);
  Shared shared(cfg, topology, rec, scheduler, timers);

  std::vector<std::unique_ptr<ArenaActor>> arenas;
  auto collector = std::make_unique<Collector>(shared);
  shared.collector = collector.get();
  shared.islands.resize(cfg.islands);
  for (std::uint32_t i = 0; i < cfg.islands; ++i) {
    shared.islands[i].ref = IslandRef{i};
    for (ArenaKind k : kArenaKinds) {
      arenas.push_back(std::make_unique<ArenaActor>(shared, k, IslandRef{i}));
      shared.islands[i].arenas[static_cast<std::size_t>(k)] = arenas.back().get();
    }
  }

  AgentIdSource initial_ids;
  std::vector<std::unique_ptr<AgentTask>> tasks;
  for (std::uint32_t i = 0; i < cfg.islands; ++i) {
    std::optional<Fitness> best;
    for (Agent& a : seed_island(cfg, IslandRef{i}, initial_ids)) {
      rec.ledger.append(0.0, IslandRef{i}, LedgerEntry{LedgerKind::spawn, a.id, 0, a.energy});
      trace.initial_energy += a.energy;
      if (!best || a.fitness < *best) best = a.fitness;
      tasks.push_back(std::make_unique<AgentTask>(shared, std::move(a), &shared.islands[i]));
    }
    rec.emit(0.0, IslandRef{i}, {}, best);
  }
  shared.spawned(static_cast<std::int64_t>(tasks.size()));
  for (auto& t : tasks) scheduler.post(t.release());
  tasks.clear();

  const auto start = std::chrono::steady_clock::now();
  const auto deadline = start + *duration;
  for (auto beat = start + cfg.heartbeat;; beat += cfg.heartbeat) {
    const auto wake = std::min(beat, deadline);
    std::this_thread::sleep_until(wake);
    if (wake == deadline) break;
    collector->send(Heartbeat{});
  }

  for (auto& a : arenas) a->send(Stop{});
  {
    std::unique_lock lock(shared.mutex);
    shared.changed.wait(lock, [&] { return shared.arenas_stopped == arenas.size() && shared.alive == 0; });
  }
  collector->send(Sync{});
  {
    std::unique_lock lock(shared.mutex);
    shared.changed.wait(lock, [&] { return shared.synced; });
  }
  timers.shutdown();
  scheduler.shutdown();

  const double end = rec.elapsed_ms();
  for (const auto& a : arenas) trace.totals += a->totals();
  for (const auto& [island, agent] : shared.survivors) trace.final_energy += agent.energy;
  trace.final_population = shared.survivors.size();
  rec.ledger.append(end, IslandRef::all(),
                    LedgerEntry{LedgerKind::end, AgentId{}, 0,
                                static_cast<Energy>(trace.final_population)});
  rec.metrics.close();

  trace.elapsed_ms = end;
  trace.lost_events = rec.metrics.lost();
  trace.events = rec.metrics.take();
  trace.ledger = rec.ledger.take();
  trace.finalize();
  return trace;
}

}  // namespace emas
