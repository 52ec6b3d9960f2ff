#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fanet/aodv/agent.hpp"
#include "fanet/medium/medium.hpp"
#include "fanet/types.hpp"

namespace fanet::harness {

/// Hop distances from `source` on the unit-disc graph; -1 when unreachable.
std::vector<int> bfs_hops(std::span<const Vec3> positions, NodeId source, double range);

struct BfsOracleConfig {
  std::size_t graphs = 50;
  std::size_t nodes = 15;
  Vec3 extent{700.0, 700.0, 100.0};  // placement box, m
  std::uint64_t seed = 1;
  medium::MediumConfig medium;
  aodv::AodvConfig aodv;
  double settle = 1.0;  // s between a discovery and the route check
};

struct HopMismatch {
  std::size_t graph = 0;
  NodeId source = kNoNode;
  NodeId destination = kNoNode;
  int expected = 0;
  int installed = -1;  // -1: no usable route
};

struct BfsOracleResult {
  std::size_t graphs = 0;
  std::size_t pairs = 0;  // connected ordered pairs checked
  std::vector<HopMismatch> mismatches;
  [[nodiscard]] bool passed() const { return pairs > 0 && mismatches.empty(); }
};

/// Static random placements, no attackers. Each connected (S, D) pair runs
/// its own discovery once the previous pair's state has expired, then the
/// hop count of S's route to D is compared with BFS.
BfsOracleResult bfs_oracle(const BfsOracleConfig& cfg);

struct ChainConfig {
  std::size_t nodes = 4;
  double spacing = 200.0;  // m
  double duration = 100.0;  // s of traffic at 1 pkt/s
  double start = 1.0;
  double drain = 5.0;
  std::uint64_t seed = 1;
  medium::MediumConfig medium;
  aodv::AodvConfig aodv;
};

struct ChainResult {
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint32_t route_hops = 0;  // source's route to the far end after the run
};

/// One flow end to end along a static line of nodes.
ChainResult static_chain(const ChainConfig& cfg);

}  // namespace fanet::harness
