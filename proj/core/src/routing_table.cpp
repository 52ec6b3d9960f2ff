#include "fanet/aodv/routing_table.hpp"

#include <algorithm>
#include <ostream>

namespace fanet::aodv {

bool should_replace(const RouteEntry& stored, const RouteCandidate& candidate, engine::SimTime now) {
  if (!stored.present || !stored.seq_known) return true;
  if (!candidate.seq_known) return false;
  if (candidate.dest_seq > stored.dest_seq) return true;
  if (candidate.dest_seq < stored.dest_seq) return false;
  if (!stored.usable(now)) return true;
  return candidate.hop_count < stored.hop_count;
}

bool RoutingTable::offer(NodeId dest, const RouteCandidate& candidate, engine::SimTime now) {
  RouteEntry* e = find(dest);
  if (e == nullptr) return false;
  if (!should_replace(*e, candidate, now)) {
    // Same route re-announced: keep it alive.
    if (e->usable(now) && candidate.seq_known && candidate.dest_seq == e->dest_seq &&
        candidate.next_hop == e->next_hop && candidate.hop_count == e->hop_count) {
      e->expiry = std::max(e->expiry, candidate.expiry);
    }
    return false;
  }
  const bool keep_seq = e->present && e->seq_known && !candidate.seq_known;
  e->destination = dest;
  e->next_hop = candidate.next_hop;
  e->hop_count = candidate.hop_count;
  if (!keep_seq) {
    e->dest_seq = candidate.seq_known ? std::max(candidate.dest_seq, e->seq_known ? e->dest_seq : 0U)
                                      : e->dest_seq;
    e->seq_known = candidate.seq_known || e->seq_known;
  }
  e->expiry = candidate.expiry;
  e->valid = true;
  e->present = true;
  return true;
}

void RoutingTable::touch_neighbor(NodeId neighbor, engine::SimTime expiry) {
  RouteEntry* e = find(neighbor);
  if (e == nullptr) return;
  if (e->present && e->valid && e->next_hop == neighbor && e->hop_count == 1) {
    e->expiry = std::max(e->expiry, expiry);
    return;
  }
  e->destination = neighbor;
  e->next_hop = neighbor;
  e->hop_count = 1;
  e->expiry = std::max(expiry, e->valid ? e->expiry : 0.0);
  e->valid = true;
  e->present = true;
}

void RoutingTable::refresh(NodeId dest, engine::SimTime expiry) {
  RouteEntry* e = find(dest);
  if (e != nullptr && e->present && e->valid) e->expiry = std::max(e->expiry, expiry);
}

std::vector<std::pair<NodeId, std::uint32_t>> RoutingTable::invalidate_via(NodeId next_hop) {
  std::vector<std::pair<NodeId, std::uint32_t>> out;
  for (RouteEntry& e : entries_) {
    if (!e.present || !e.valid || e.next_hop != next_hop) continue;
    e.valid = false;
    if (e.seq_known) ++e.dest_seq;
    out.emplace_back(e.destination, e.dest_seq);
  }
  return out;
}

std::optional<std::uint32_t> RoutingTable::invalidate_if_via(NodeId dest, NodeId next_hop, std::uint32_t seq) {
  RouteEntry* e = find(dest);
  if (e == nullptr || !e->present || !e->valid || e->next_hop != next_hop) return std::nullopt;
  e->valid = false;
  if (e->seq_known) {
    e->dest_seq = std::max(e->dest_seq, seq);
  } else {
    e->dest_seq = seq;
    e->seq_known = true;
  }
  return e->dest_seq;
}

void RoutingTable::dump_csv(std::ostream& out, engine::SimTime now, NodeId self) const {
  for (const RouteEntry& e : entries_) {
    if (!e.present) continue;
    out << now << ',' << self << ',' << e.destination << ',' << e.next_hop << ',' << e.hop_count << ','
        << e.dest_seq << ',' << (e.usable(now) ? 1 : 0) << '\n';
  }
}

}  // namespace fanet::aodv
