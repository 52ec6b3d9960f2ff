#include "fanet/aodv/agent.hpp"

#include <algorithm>
#include <cmath>

namespace fanet::aodv {

Agent::Agent(NodeId self, AgentContext* ctx)
    : self_(self),
      ctx_(ctx),
      table_(ctx->node_count),
      pending_(ctx->node_count),
      discovery_(ctx->node_count) {}

Agent::Seen* Agent::find_seen(NodeId originator, std::uint32_t rreq_id) {
  if (originator >= seen_.size()) return nullptr;
  auto& list = seen_[originator];
  for (auto it = list.rbegin(); it != list.rend(); ++it) {
    if (it->rreq_id == rreq_id) return it->expiry > now() ? &*it : nullptr;
  }
  return nullptr;
}

void Agent::remember(NodeId originator, std::uint32_t rreq_id, std::uint32_t hops) {
  if (originator >= seen_.size()) seen_.resize(originator + 1);
  auto& list = seen_[originator];
  const engine::SimTime t = now();
  std::erase_if(list, [t, rreq_id](const Seen& s) { return s.expiry <= t || s.rreq_id == rreq_id; });
  list.push_back(Seen{rreq_id, t + cfg().seen_cache_lifetime, hops});
}

bool Agent::discovering(NodeId dest) const {
  return dest < discovery_.size() && discovery_[dest].active;
}

std::size_t Agent::pending_count(NodeId dest) const {
  return dest < pending_.size() ? pending_[dest].size() : 0;
}

bool Agent::send_data(DataPacket packet) {
  const NodeId dest = packet.destination;
  if (const RouteEntry* r = table_.usable(dest, now())) {
    const NodeId next = r->next_hop;
    table_.refresh(dest, now() + cfg().active_route_timeout);
    table_.refresh(next, now() + cfg().active_route_timeout);
    enqueue_data(next, std::move(packet));
    return true;
  }
  buffer(std::move(packet), false);
  return false;
}

void Agent::buffer(DataPacket packet, bool destination_only) {
  const NodeId dest = packet.destination;
  if (dest >= pending_.size()) {
    if (ctx_->observer) ctx_->observer->data_dropped(self_, packet, DropReason::no_route);
    return;
  }
  auto& queue = pending_[dest];
  if (queue.size() >= cfg().pending_capacity) {
    if (ctx_->observer) ctx_->observer->data_dropped(self_, queue.front(), DropReason::overflow);
    queue.pop_front();
  }
  queue.push_back(std::move(packet));
  if (!discovery_[dest].active) start_discovery(dest, destination_only);
}

void Agent::start_discovery(NodeId dest, bool destination_only) {
  Discovery& d = discovery_[dest];
  d.active = true;
  d.destination_only = destination_only;
  d.attempts = 1;
  originate_rreq(dest, destination_only);
  d.timer = ctx_->sim->schedule_in(cfg().net_traversal_time(), [this, dest] { discovery_timeout(dest); },
                                   engine::EventKind::timer_expiry);
}

void Agent::discovery_timeout(NodeId dest) {
  Discovery& d = discovery_[dest];
  if (!d.active) return;
  if (table_.usable(dest, now()) != nullptr) {
    d.active = false;
    flush_pending(dest);
    return;
  }
  if (d.attempts <= cfg().rreq_retries) {
    ++d.attempts;
    originate_rreq(dest, d.destination_only);
    // Binary exponential backoff between attempts.
    const double wait = cfg().net_traversal_time() * std::ldexp(1.0, d.attempts - 1);
    d.timer = ctx_->sim->schedule_in(wait, [this, dest] { discovery_timeout(dest); },
                                     engine::EventKind::timer_expiry);
    return;
  }
  d.active = false;
  ++counters_.discoveries_failed;
  auto& queue = pending_[dest];
  while (!queue.empty()) {
    if (ctx_->observer) ctx_->observer->data_dropped(self_, queue.front(), DropReason::no_route);
    queue.pop_front();
  }
}

void Agent::originate_rreq(NodeId dest, bool destination_only) {
  ++own_seq_;
  const std::uint32_t id = next_rreq_id_++;
  remember(self_, id, 0);

  Rreq rreq;
  rreq.originator = self_;
  rreq.orig_seq = own_seq_;
  rreq.rreq_id = id;
  rreq.destination = dest;
  rreq.destination_only = destination_only;
  rreq.hop_count = 0;
  if (const RouteEntry* e = table_.find(dest); e != nullptr && e->present && e->seq_known) {
    rreq.last_known_dest_seq = e->dest_seq;
    rreq.unknown_seq = false;
  }
  ++counters_.rreq_originated;
  if (ctx_->observer) ctx_->observer->rreq_originated(self_, rreq);
  send_broadcast(rreq, FrameKind::rreq);
}

void Agent::receive(const Frame& frame) {
  if (ctx_->observer) ctx_->observer->frame_received(self_, frame);
  const NodeId from = frame.link_src;
  std::visit(
      [&](const auto& msg) {
        using T = std::decay_t<decltype(msg)>;
        if constexpr (std::is_same_v<T, Rreq>) {
          handle_rreq(msg, from);
        } else if constexpr (std::is_same_v<T, Rrep>) {
          handle_rrep(msg, from);
        } else if constexpr (std::is_same_v<T, Rerr>) {
          handle_rerr(msg, from);
        } else {
          handle_data(msg, from);
        }
      },
      frame.payload);
}

void Agent::handle_rreq(const Rreq& rreq, NodeId from) {
  if (rreq.originator == self_) return;
  const engine::SimTime t = now();
  const std::uint32_t hops = rreq.hop_count + 1U;

  bool improved = false;
  if (Seen* seen = find_seen(rreq.originator, rreq.rreq_id)) {
    if (!cfg().process_shorter_duplicates || hops >= seen->hops) {
      ++counters_.rreq_duplicates;
      return;
    }
    seen->hops = hops;
    improved = true;
  } else {
    remember(rreq.originator, rreq.rreq_id, hops);
  }

  const double art = cfg().active_route_timeout;
  table_.touch_neighbor(from, t + art);
  table_.offer(rreq.originator, RouteCandidate{from, hops, rreq.orig_seq, true, t + art}, t);

  if (rreq.destination == self_) {
    reply_as_destination(rreq, from, !improved);
    return;
  }

  if (hooks_ != nullptr && !rreq.destination_only && hooks_->forges_replies(self_)) {
    if (improved) return;
    const RouteEntry* back = table_.usable(rreq.originator, t);
    const NodeId toward = back != nullptr ? back->next_hop : from;
    // A fake reply through our own next hop to the destination would point
    // that hop back at us and trap relayed data in a two-node loop.
    if (const RouteEntry* mine = table_.usable(rreq.destination, t); mine != nullptr && mine->next_hop == toward) {
      ++counters_.rrep_withheld;
      return;
    }
    Rrep fake = hooks_->forge_reply(self_, rreq);
    ++counters_.rrep_forged;
    send_unicast(toward, fake, FrameKind::rrep);
    return;
  }

  if (!rreq.destination_only) {
    const RouteEntry* r = table_.usable(rreq.destination, t);
    if (r != nullptr && r->seq_known && (rreq.unknown_seq || r->dest_seq >= rreq.last_known_dest_seq)) {
      Rrep reply;
      reply.destination = rreq.destination;
      reply.dest_seq = r->dest_seq;
      reply.originator = rreq.originator;
      reply.hop_count = static_cast<std::uint8_t>(std::min<std::uint32_t>(r->hop_count, 255));
      reply.lifetime = r->expiry - t;
      ++counters_.rrep_originated;
      const RouteEntry* back = table_.usable(rreq.originator, t);
      send_unicast(back != nullptr ? back->next_hop : from, reply, FrameKind::rrep);
      return;
    }
  }

  if (hops >= cfg().net_diameter) return;
  Rreq fwd = rreq;
  fwd.hop_count = static_cast<std::uint8_t>(hops);
  if (const RouteEntry* e = table_.find(rreq.destination); e != nullptr && e->present && e->seq_known) {
    if (fwd.unknown_seq || e->dest_seq > fwd.last_known_dest_seq) {
      fwd.last_known_dest_seq = e->dest_seq;
      fwd.unknown_seq = false;
    }
  }
  ++counters_.rreq_forwarded;
  send_broadcast(fwd, FrameKind::rreq);
}

void Agent::reply_as_destination(const Rreq& rreq, NodeId from, bool bump_seq) {
  if (bump_seq) {
    const std::uint32_t requested = rreq.unknown_seq ? 0U : rreq.last_known_dest_seq;
    own_seq_ = std::max(own_seq_, requested) + 1U;
  }
  Rrep reply;
  reply.destination = self_;
  reply.dest_seq = own_seq_;
  reply.originator = rreq.originator;
  reply.hop_count = 0;
  reply.lifetime = cfg().active_route_timeout;
  ++counters_.rrep_originated;
  const RouteEntry* back = table_.usable(rreq.originator, now());
  send_unicast(back != nullptr ? back->next_hop : from, reply, FrameKind::rrep);
}

void Agent::handle_rrep(const Rrep& rrep, NodeId from) {
  const engine::SimTime t = now();
  const double art = cfg().active_route_timeout;
  if (rrep.destination == self_) {
    table_.touch_neighbor(from, t + art);
    return;
  }

  // Offer before touching the sender, or a reply straight from the
  // destination would look like a route we already hold.
  const std::uint32_t hops = rrep.hop_count + 1U;
  const bool updated =
      table_.offer(rrep.destination, RouteCandidate{from, hops, rrep.dest_seq, true, t + rrep.lifetime}, t);
  table_.touch_neighbor(from, t + art);

  if (rrep.originator == self_) {
    const NodeId dest = rrep.destination;
    if (dest < discovery_.size() && table_.usable(dest, t) != nullptr) {
      Discovery& d = discovery_[dest];
      if (d.active) {
        d.active = false;
        ctx_->sim->cancel(d.timer);
      }
      flush_pending(dest);
    }
    return;
  }
  // Only a created or updated route is passed on; this also stops replies
  // circling on poisoned reverse routes.
  if (!updated) return;

  const RouteEntry* back = table_.usable(rrep.originator, t);
  if (back == nullptr) {
    ++counters_.rrep_dropped_no_reverse;
    return;
  }
  const NodeId next = back->next_hop;
  table_.refresh(rrep.originator, t + art);
  Rrep fwd = rrep;
  fwd.hop_count = static_cast<std::uint8_t>(std::min<std::uint32_t>(hops, 255));
  ++counters_.rrep_forwarded;
  send_unicast(next, fwd, FrameKind::rrep);
}

void Agent::handle_rerr(const Rerr& rerr, NodeId from) {
  std::vector<Unreachable> propagate;
  for (const Unreachable& u : rerr.unreachable) {
    if (auto seq = table_.invalidate_if_via(u.destination, from, u.dest_seq)) {
      propagate.push_back(Unreachable{u.destination, *seq});
    }
  }
  if (!propagate.empty()) send_rerr(std::move(propagate));
}

void Agent::handle_data(const DataPacket& packet, NodeId from) {
  table_.touch_neighbor(from, now() + cfg().active_route_timeout);
  if (packet.destination == self_) {
    if (ctx_->observer) ctx_->observer->data_delivered(self_, packet);
    if (deliver_) deliver_(packet);
    return;
  }
  if (hooks_ != nullptr && hooks_->drop_relayed_data(self_, packet)) {
    if (ctx_->observer) ctx_->observer->data_dropped(self_, packet, DropReason::attacker);
    return;
  }
  if (packet.ttl <= 1) {
    if (ctx_->observer) ctx_->observer->data_dropped(self_, packet, DropReason::ttl_expired);
    return;
  }
  DataPacket next = packet;
  --next.ttl;
  forward_data(std::move(next));
}

void Agent::forward_data(DataPacket packet) {
  const engine::SimTime t = now();
  const double art = cfg().active_route_timeout;
  const NodeId dest = packet.destination;
  if (const RouteEntry* r = table_.usable(dest, t)) {
    const NodeId next = r->next_hop;
    table_.refresh(dest, t + art);
    table_.refresh(next, t + art);
    table_.refresh(packet.source, t + art);
    enqueue_data(next, std::move(packet));
    return;
  }
  if (hooks_ != nullptr && hooks_->discover_when_relaying(self_)) {
    buffer(std::move(packet), true);
    return;
  }
  if (ctx_->observer) ctx_->observer->data_dropped(self_, packet, DropReason::no_route);
  std::uint32_t seq = 0;
  if (const RouteEntry* e = table_.find(dest); e != nullptr && e->present && e->seq_known) seq = e->dest_seq + 1U;
  send_rerr({Unreachable{dest, seq}});
}

void Agent::flush_pending(NodeId dest) {
  auto& queue = pending_[dest];
  while (!queue.empty()) {
    const RouteEntry* r = table_.usable(dest, now());
    if (r == nullptr) return;
    const NodeId next = r->next_hop;
    table_.refresh(dest, now() + cfg().active_route_timeout);
    DataPacket p = std::move(queue.front());
    queue.pop_front();
    enqueue_data(next, std::move(p));
  }
}

void Agent::enqueue_data(NodeId next_hop, DataPacket packet) {
  Frame f;
  f.kind = FrameKind::data;
  f.link_dst = next_hop;
  f.payload = packet;
  if (ctx_->medium->enqueue(self_, std::move(f)) == medium::EnqueueResult::dropped_overflow) {
    if (ctx_->observer) ctx_->observer->data_dropped(self_, packet, DropReason::overflow);
  }
}

void Agent::send_unicast(NodeId next_hop, Payload payload, FrameKind kind) {
  Frame f;
  f.kind = kind;
  f.link_dst = next_hop;
  f.payload = std::move(payload);
  ctx_->medium->enqueue(self_, std::move(f));
}

void Agent::send_broadcast(Payload payload, FrameKind kind) {
  Frame f;
  f.kind = kind;
  f.link_dst = kBroadcast;
  f.payload = std::move(payload);
  ctx_->medium->enqueue(self_, std::move(f));
}

void Agent::send_rerr(std::vector<Unreachable> entries) {
  ++counters_.rerr_sent;
  send_broadcast(Rerr{std::move(entries)}, FrameKind::rerr);
}

void Agent::link_break(const Frame& frame) {
  if (const auto* packet = std::get_if<DataPacket>(&frame.payload)) {
    if (ctx_->observer) ctx_->observer->data_dropped(self_, *packet, DropReason::lost_range);
  }
  auto invalidated = table_.invalidate_via(frame.link_dst);
  if (invalidated.empty()) return;
  std::vector<Unreachable> entries;
  entries.reserve(invalidated.size());
  for (const auto& [dest, seq] : invalidated) entries.push_back(Unreachable{dest, seq});
  send_rerr(std::move(entries));
}

void Agent::for_each_pending(const std::function<void(const DataPacket&)>& fn) const {
  for (const auto& queue : pending_) {
    for (const DataPacket& p : queue) fn(p);
  }
}

void Agent::install_route(NodeId dest, NodeId next_hop, std::uint32_t hops, std::uint32_t seq,
                          engine::SimTime expiry) {
  RouteEntry* e = table_.find(dest);
  if (e == nullptr) return;
  e->destination = dest;
  e->next_hop = next_hop;
  e->hop_count = hops;
  e->dest_seq = seq;
  e->seq_known = true;
  e->expiry = expiry;
  e->valid = true;
  e->present = true;
}

}  // namespace fanet::aodv
