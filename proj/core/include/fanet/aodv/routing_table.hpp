#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "fanet/engine/simulator.hpp"
#include "fanet/types.hpp"

namespace fanet::aodv {

struct RouteEntry {
  NodeId destination = kNoNode;
  NodeId next_hop = kNoNode;
  std::uint32_t hop_count = 0;
  std::uint32_t dest_seq = 0;
  bool seq_known = false;
  engine::SimTime expiry = 0.0;
  bool valid = false;
  bool present = false;

  [[nodiscard]] bool usable(engine::SimTime now) const { return present && valid && expiry > now; }
};

struct RouteCandidate {
  NodeId next_hop = kNoNode;
  std::uint32_t hop_count = 1;
  std::uint32_t dest_seq = 0;
  bool seq_known = true;
  engine::SimTime expiry = 0.0;
};

/// Freshness first, then hop count: a candidate replaces the stored route iff
/// it carries a larger sequence number, or the same sequence number with fewer
/// hops (or the stored route is no longer usable). Unknown stored sequence
/// numbers always yield.
bool should_replace(const RouteEntry& stored, const RouteCandidate& candidate, engine::SimTime now);

/// Per-node table indexed by destination id.
class RoutingTable {
 public:
  explicit RoutingTable(std::size_t node_count = 0) : entries_(node_count) {}

  [[nodiscard]] std::size_t size() const { return entries_.size(); }

  /// Null for ids outside the network (e.g. flood targets that do not exist).
  [[nodiscard]] const RouteEntry* find(NodeId dest) const {
    return dest < entries_.size() ? &entries_[dest] : nullptr;
  }
  RouteEntry* find(NodeId dest) { return dest < entries_.size() ? &entries_[dest] : nullptr; }

  [[nodiscard]] const RouteEntry* usable(NodeId dest, engine::SimTime now) const {
    const RouteEntry* e = find(dest);
    return e != nullptr && e->usable(now) ? e : nullptr;
  }

  /// Applies should_replace; returns true if the entry changed. The stored
  /// sequence number never decreases.
  bool offer(NodeId dest, const RouteCandidate& candidate, engine::SimTime now);

  /// Route to a direct neighbor, learned from any frame it sent us.
  void touch_neighbor(NodeId neighbor, engine::SimTime expiry);

  /// Extends the lifetime of a usable route.
  void refresh(NodeId dest, engine::SimTime expiry);

  /// Invalidates every valid route whose next hop is `next_hop`, bumping
  /// known sequence numbers. Returns the (destination, seq) pairs invalidated.
  std::vector<std::pair<NodeId, std::uint32_t>> invalidate_via(NodeId next_hop);

  /// Invalidates the route to `dest` if it goes through `next_hop`.
  std::optional<std::uint32_t> invalidate_if_via(NodeId dest, NodeId next_hop, std::uint32_t seq);

  [[nodiscard]] const std::vector<RouteEntry>& entries() const { return entries_; }

  /// CSV rows: time,node,dest,next_hop,hops,seq,valid
  void dump_csv(std::ostream& out, engine::SimTime now, NodeId self) const;

 private:
  std::vector<RouteEntry> entries_;
};

}  // namespace fanet::aodv
