#include "emas/topology.hpp"

#include <algorithm>
#include <stdexcept>

#include "emas/core.hpp"

namespace emas {

Topology Topology::fully_connected(std::size_t islands) {
  Topology t;
  t.neighbours_.resize(islands);
  for (std::size_t i = 0; i < islands; ++i)
    for (std::size_t j = 0; j < islands; ++j)
      if (i != j) t.neighbours_[i].push_back(IslandRef{static_cast<std::uint32_t>(j)});
  return t;
}

Topology Topology::ring(std::size_t islands) {
  Topology t;
  t.neighbours_.resize(islands);
  if (islands < 2) return t;
  for (std::size_t i = 0; i < islands; ++i) {
    auto& n = t.neighbours_[i];
    n.push_back(IslandRef{static_cast<std::uint32_t>((i + islands - 1) % islands)});
    const IslandRef next{static_cast<std::uint32_t>((i + 1) % islands)};
    if (std::find(n.begin(), n.end(), next) == n.end()) n.push_back(next);
  }
  return t;
}

Topology Topology::make(TopologyKind kind, std::size_t islands) {
  return kind == TopologyKind::ring ? ring(islands) : fully_connected(islands);
}

std::span<const IslandRef> Topology::neighbours(IslandRef island) const {
  if (island.index >= neighbours_.size()) throw std::out_of_range("island not in topology");
  return neighbours_[island.index];
}

IslandRef Topology::pick_destination(IslandRef from, RandomSource& rng) const {
  const auto n = neighbours(from);
  if (n.empty()) throw std::logic_error("pick_destination: island has no neighbours");
  return n[rng.index(n.size())];
}

std::string to_string(TopologyKind kind) {
  return kind == TopologyKind::ring ? "ring" : "fully_connected";
}

TopologyKind parse_topology(const std::string& name) {
  if (name == "fully_connected") return TopologyKind::fully_connected;
  if (name == "ring") return TopologyKind::ring;
  throw ConfigError("unknown topology: " + name);
}

}  // namespace emas
