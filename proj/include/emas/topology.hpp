#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "emas/random.hpp"

namespace emas {

struct IslandRef {
  std::uint32_t index = 0;

  /// Pseudo-island for run-wide observations (heartbeats).
  static constexpr IslandRef all() { return IslandRef{std::numeric_limits<std::uint32_t>::max()}; }
  constexpr bool is_all() const { return index == all().index; }

  friend constexpr auto operator<=>(IslandRef, IslandRef) = default;
};

enum class TopologyKind { fully_connected, ring };

/// Migration graph over islands. Neighbour lists never contain the island itself.
class Topology {
 public:
  static Topology fully_connected(std::size_t islands);
  static Topology ring(std::size_t islands);
  static Topology make(TopologyKind kind, std::size_t islands);

  std::size_t size() const noexcept { return neighbours_.size(); }
  std::span<const IslandRef> neighbours(IslandRef island) const;

  /// Uniform draw from the neighbours of `from`; requires at least one.
  IslandRef pick_destination(IslandRef from, RandomSource& rng) const;

 private:
  std::vector<std::vector<IslandRef>> neighbours_;
};

std::string to_string(TopologyKind kind);
TopologyKind parse_topology(const std::string& name);

}  // namespace emas
