#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "emas/core.hpp"
#include "emas/topology.hpp"

namespace emas {

/// Energy-relevant events. Conventions for (agent, other, amount):
///   spawn    agent enters the run holding `amount`
///   birth    agent is a newborn of parent `other`, holding nothing yet
///   donate   `amount` moves from parent `agent` to child `other`
///   transfer `amount` moves from fight loser `agent` to winner `other`
///   death    agent removed; must hold exactly zero
///   migrate  agent leaves for island `other`
///   final    agent survives shutdown holding `amount`
///   end      clean shutdown reached; `amount` is the survivor count
enum class LedgerKind { spawn, birth, donate, transfer, death, migrate, final, end };

struct LedgerEntry {
  LedgerKind kind = LedgerKind::spawn;
  AgentId agent;
  std::uint64_t other = 0;
  Energy amount = 0;
};

struct LedgerEvent {
  double timestamp_ms = 0.0;
  IslandRef island;
  LedgerEntry entry;
};

/// Causally ordered, thread-safe energy event log. Disabled logs drop
/// everything so engines can record unconditionally.
class LedgerLog {
 public:
  explicit LedgerLog(bool enabled = false) : enabled_(enabled) {}

  bool enabled() const noexcept { return enabled_; }

  void append(double timestamp_ms, IslandRef island, const LedgerEntry& entry) {
    if (!enabled_) return;
    std::lock_guard lock(mutex_);
    events_.push_back(LedgerEvent{timestamp_ms, island, entry});
  }

  template <class Range>
  void append_all(double timestamp_ms, IslandRef island, const Range& entries) {
    if (!enabled_) return;
    std::lock_guard lock(mutex_);
    for (const auto& e : entries) events_.push_back(LedgerEvent{timestamp_ms, island, e});
  }

  std::vector<LedgerEvent> take() {
    std::lock_guard lock(mutex_);
    return std::move(events_);
  }

 private:
  bool enabled_;
  std::mutex mutex_;
  std::vector<LedgerEvent> events_;
};

std::string to_string(LedgerKind kind);
std::optional<LedgerKind> parse_ledger_kind(const std::string& name);

}  // namespace emas
