#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <queue>
#include <thread>
#include <vector>

#include "emas/random.hpp"

namespace emas::runtime {

/// Per-worker-thread state handed to every task it runs.
struct WorkerContext {
  std::size_t index = 0;
  RandomSource rng{0};
};

/// A unit of schedulable work. Whoever posts a Runnable decides ownership:
/// the scheduler never deletes what it runs.
class Runnable {
 public:
  virtual ~Runnable() = default;
  virtual void run(WorkerContext& ctx) = 0;
};

/// Fixed pool of worker threads draining one FIFO run queue. Tasks are
/// lightweight: tens of thousands may be parked in mailboxes or the queue
/// without a thread each.
class Scheduler {
 public:
  Scheduler(std::size_t threads, std::uint64_t seed);
  ~Scheduler();

  Scheduler(const Scheduler&) = delete;
  Scheduler& operator=(const Scheduler&) = delete;

  void post(Runnable* task);

  /// Stops the workers after their current task; queued tasks are dropped.
  void shutdown();

  std::size_t threads() const noexcept { return workers_.size(); }

 private:
  void worker_main(std::size_t index, std::uint64_t seed);

  std::mutex mutex_;
  std::condition_variable ready_;
  std::deque<Runnable*> queue_;
  bool stopping_ = false;
  std::vector<std::thread> workers_;
};

/// Single-consumer actor: messages from any thread are queued and handled
/// one at a time on some scheduler worker. `handle` returns true to yield
/// the worker after the message (cooperative fairness).
template <class Message>
class Actor : public Runnable {
 public:
  explicit Actor(Scheduler& scheduler) : scheduler_(scheduler) {}

  void send(Message message) {
    bool post = false;
    {
      std::lock_guard lock(mutex_);
      mailbox_.push_back(std::move(message));
      if (!scheduled_) scheduled_ = post = true;
    }
    if (post) scheduler_.post(this);
  }

  void run(WorkerContext& ctx) final {
    for (;;) {
      Message m = [&] {
        std::lock_guard lock(mutex_);
        Message front = std::move(mailbox_.front());
        mailbox_.pop_front();
        return front;
      }();
      const bool yield = handle(std::move(m), ctx);
      std::lock_guard lock(mutex_);
      if (mailbox_.empty()) {
        scheduled_ = false;
        return;
      }
      if (yield) break;
    }
    scheduler_.post(this);
  }

 protected:
  virtual bool handle(Message message, WorkerContext& ctx) = 0;
  Scheduler& scheduler() noexcept { return scheduler_; }

 private:
  Scheduler& scheduler_;
  std::mutex mutex_;
  std::deque<Message> mailbox_;
  bool scheduled_ = false;
};

/// One thread firing callbacks at deadlines. Callbacks must be cheap; they
/// typically send a message.
class TimerService {
 public:
  using Clock = std::chrono::steady_clock;

  TimerService();
  ~TimerService();

  TimerService(const TimerService&) = delete;
  TimerService& operator=(const TimerService&) = delete;

  void schedule(Clock::time_point deadline, std::function<void()> callback);

  /// Joins the timer thread; pending callbacks are discarded.
  void shutdown();

 private:
  struct Entry {
    Clock::time_point deadline;
    std::uint64_t order;
    std::function<void()> callback;
    bool operator>(const Entry& o) const {
      return deadline != o.deadline ? deadline > o.deadline : order > o.order;
    }
  };

  void timer_main();

  std::mutex mutex_;
  std::condition_variable changed_;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> entries_;
  std::uint64_t order_ = 0;
  bool stopping_ = false;
  std::thread thread_;
};

}  // namespace emas::runtime
