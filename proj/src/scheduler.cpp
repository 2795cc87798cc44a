#include "emas/runtime/scheduler.hpp"

namespace emas::runtime {

Scheduler::Scheduler(std::size_t threads, std::uint64_t seed) {
  if (threads == 0) threads = 1;
  workers_.reserve(threads);
  for (std::size_t i = 0; i < threads; ++i)
    workers_.emplace_back([this, i, seed] { worker_main(i, seed); });
}

Scheduler::~Scheduler() { shutdown(); }

void Scheduler::post(Runnable* task) {
  {
    std::lock_guard lock(mutex_);
    if (stopping_) return;
    queue_.push_back(task);
  }
  ready_.notify_one();
}

void Scheduler::shutdown() {
  {
    std::lock_guard lock(mutex_);
    if (stopping_ && workers_.empty()) return;
    stopping_ = true;
    queue_.clear();
  }
  ready_.notify_all();
  for (auto& t : workers_)
    if (t.joinable()) t.join();
  workers_.clear();
}

void Scheduler::worker_main(std::size_t index, std::uint64_t seed) {
  WorkerContext ctx{index, RandomSource::derive(seed, 0x5eed0000ULL + index)};
  for (;;) {
    Runnable* task = nullptr;
    {
      std::unique_lock lock(mutex_);
      ready_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (stopping_) return;
      task = queue_.front();
      queue_.pop_front();
    }
    task->run(ctx);
  }
}

TimerService::TimerService() : thread_([this] { timer_main(); }) {}

TimerService::~TimerService() { shutdown(); }

void TimerService::schedule(Clock::time_point deadline, std::function<void()> callback) {
  {
    std::lock_guard lock(mutex_);
    if (stopping_) return;
    entries_.push(Entry{deadline, order_++, std::move(callback)});
  }
  changed_.notify_one();
}

void TimerService::shutdown() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  changed_.notify_all();
  if (thread_.joinable()) thread_.join();
}

void TimerService::timer_main() {
  std::unique_lock lock(mutex_);
  while (!stopping_) {
    if (entries_.empty()) {
      changed_.wait(lock);
      continue;
    }
    const auto deadline = entries_.top().deadline;
    if (Clock::now() < deadline) {
      changed_.wait_until(lock, deadline);
      continue;
    }
    auto callback = std::move(const_cast<Entry&>(entries_.top()).callback);
    entries_.pop();
    lock.unlock();
    callback();
    lock.lock();
  }
}

}  // namespace emas::runtime
