#include "emas/engine_hybrid.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <memory>
#include <mutex>

#include "emas/engine_seq.hpp"
#include "emas/runtime/scheduler.hpp"

namespace emas {

namespace {

/// Many-producer, single-consumer immigrant queue.
class Inbox {
 public:
  void deliver(Agent agent) {
    std::lock_guard lock(mutex_);
    if (closed_) {
      ++losses_;
      return;
    }
    agents_.push_back(std::move(agent));
  }

  void drain_into(std::vector<Agent>& population) {
    std::lock_guard lock(mutex_);
    for (Agent& a : agents_) population.push_back(std::move(a));
    agents_.clear();
  }

  /// Refuses further deliveries and hands back whatever is still queued.
  std::vector<Agent> close() {
    std::lock_guard lock(mutex_);
    closed_ = true;
    return std::move(agents_);
  }

  std::uint64_t losses() const {
    std::lock_guard lock(mutex_);
    return losses_;
  }

 private:
  mutable std::mutex mutex_;
  std::vector<Agent> agents_;
  bool closed_ = false;
  std::uint64_t losses_ = 0;
};

class IslandWorker;

struct HybridShared {
  HybridShared(const RunConfig& c, const Topology& t, RunRecorder& r) : cfg(c), topology(t), recorder(r) {}

  const RunConfig& cfg;
  const Topology& topology;
  RunRecorder& recorder;
  runtime::Scheduler* scheduler = nullptr;
  std::vector<std::unique_ptr<IslandWorker>> workers;
  std::atomic<bool> stop{false};
  std::mutex done_mutex;
  std::condition_variable done_cv;
  std::size_t done = 0;
  std::optional<std::uint64_t> step_limit;
};

class IslandWorker final : public runtime::Runnable {
 public:
  IslandWorker(HybridShared& shared, IslandRef ref)
      : shared_(shared),
        ref_(ref),
        ids_(static_cast<std::uint16_t>(ref.index + 1)),
        rng_(RandomSource::derive(shared.cfg.seed, 0x4879ULL << 32 | ref.index)) {
    population_ = seed_island(shared.cfg, ref, ids_);
    auto& rec = shared.recorder;
    for (const Agent& a : population_)
      rec.ledger.append(0.0, ref_, LedgerEntry{LedgerKind::spawn, a.id, 0, a.energy});
    std::optional<Fitness> best;
    for (const Agent& a : population_)
      if (!best || a.fitness < *best) best = a.fitness;
    rec.emit(0.0, ref_, {}, best);
  }

  Inbox& inbox() noexcept { return inbox_; }
  std::vector<Agent>& population() noexcept { return population_; }
  const MeetingCounts& counts() const noexcept { return counts_; }
  IslandRef ref() const noexcept { return ref_; }

  void run(runtime::WorkerContext&) override {
    if (shared_.stop.load(std::memory_order_acquire)) return finish();
    inbox_.drain_into(population_);
    const double now = shared_.recorder.elapsed_ms();
    IslandRound round = run_island_round(population_, ref_, shared_.cfg, shared_.topology, ids_,
                                         rng_, &shared_.recorder, now);
    counts_ += round.counts;
    std::shuffle(population_.begin(), population_.end(), rng_);
    for (Emigrant& e : round.emigrants)
      shared_.workers.at(e.destination.index)->inbox().deliver(std::move(e.agent));
    ++steps_;
    if (shared_.step_limit && steps_ >= *shared_.step_limit) return finish();
    shared_.scheduler->post(this);
  }

 private:
  void finish() {
    {
      std::lock_guard lock(shared_.done_mutex);
      ++shared_.done;
    }
    shared_.done_cv.notify_all();
  }

  HybridShared& shared_;
  IslandRef ref_;
  AgentIdSource ids_;
  RandomSource rng_;
  std::vector<Agent> population_;
  Inbox inbox_;
  MeetingCounts counts_;
  std::uint64_t steps_ = 0;
};

}  // namespace

RunTrace run_hybrid(const RunConfig& cfg) {
  cfg.validate();
  RunRecorder rec(false, cfg.ledger);
  const Topology topology = Topology::make(cfg.topology, cfg.islands);
  HybridShared shared(cfg, topology, rec);
  if (const auto* s = std::get_if<StepBudget>(&cfg.budget)) shared.step_limit = s->steps;

  RunTrace trace;
  trace.run_id = cfg.run_id;
  trace.model = Model::hybrid;
  trace.config = describe(cfg, Model::hybrid);

  for (std::uint32_t i = 0; i < cfg.islands; ++i)
    shared.workers.push_back(std::make_unique<IslandWorker>(shared, IslandRef{i}));
  for (const auto& w : shared.workers) trace.initial_energy += total_energy(w->population());

  {
    runtime::Scheduler scheduler(std::min(cfg.units, cfg.islands), cfg.seed);
    shared.scheduler = &scheduler;
    if (shared.step_limit && *shared.step_limit == 0) shared.stop = true;
    for (const auto& w : shared.workers) scheduler.post(w.get());

    const auto start = std::chrono::steady_clock::now();
    std::optional<std::chrono::steady_clock::time_point> deadline;
    if (const auto* d = std::get_if<std::chrono::milliseconds>(&cfg.budget)) deadline = start + *d;
    auto next_beat = start + cfg.heartbeat;

    std::unique_lock lock(shared.done_mutex);
    while (shared.done < shared.workers.size()) {
      auto wake = next_beat;
      if (deadline && !shared.stop) wake = std::min(wake, *deadline);
      shared.done_cv.wait_until(lock, wake, [&] { return shared.done == shared.workers.size(); });
      const auto now = std::chrono::steady_clock::now();
      if (deadline && now >= *deadline) shared.stop.store(true, std::memory_order_release);
      if (now >= next_beat) {
        rec.metrics.heartbeat(rec.elapsed_ms());
        next_beat += cfg.heartbeat;
      }
    }
    lock.unlock();
    scheduler.shutdown();
  }

  // Every worker is parked; whatever is still in an inbox was in flight.
  for (const auto& w : shared.workers) {
    for (Agent& a : w->inbox().close()) w->population().push_back(std::move(a));
    trace.shutdown_losses += w->inbox().losses();
  }
  const double end = rec.elapsed_ms();
  for (const auto& w : shared.workers) {
    trace.totals += w->counts();
    trace.final_energy += total_energy(w->population());
    trace.final_population += w->population().size();
    for (const Agent& a : w->population())
      rec.ledger.append(end, w->ref(), LedgerEntry{LedgerKind::final, a.id, 0, a.energy});
  }
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
