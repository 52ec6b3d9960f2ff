#include "fanet/medium/medium.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace fanet {

std::string_view to_string(FrameKind kind) {
  switch (kind) {
    case FrameKind::data: return "data";
    case FrameKind::rreq: return "rreq";
    case FrameKind::rrep: return "rrep";
    case FrameKind::rerr: return "rerr";
  }
  return "unknown";
}

}  // namespace fanet

namespace fanet::medium {
namespace {

constexpr double kSpeedOfLight = 299792458.0;

}  // namespace

std::uint32_t MediumConfig::frame_size(const Payload& payload) const {
  struct Sizer {
    const MediumConfig& c;
    std::uint32_t operator()(const DataPacket& p) const { return c.link_header_bytes + p.payload_bytes; }
    std::uint32_t operator()(const Rreq&) const { return c.link_header_bytes + c.rreq_bytes; }
    std::uint32_t operator()(const Rrep&) const { return c.link_header_bytes + c.rrep_bytes; }
    std::uint32_t operator()(const Rerr& e) const {
      const auto extra = e.unreachable.empty() ? 0U : static_cast<std::uint32_t>(e.unreachable.size() - 1);
      return c.link_header_bytes + c.rerr_bytes + extra * c.rerr_entry_bytes;
    }
  };
  return std::visit(Sizer{*this}, payload);
}

std::vector<NodeId> neighbors(NodeId node, std::span<const Vec3> positions, double range) {
  std::vector<NodeId> out;
  const double r2 = range * range;
  const Vec3 self = positions[node];
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (i == node) continue;
    if (distance_squared(self, positions[i]) <= r2) out.push_back(static_cast<NodeId>(i));
  }
  return out;
}

Medium::Medium(engine::Simulator& sim, std::size_t node_count, PositionProvider positions,
               MediumConfig cfg, engine::RngStream backoff_rng)
    : sim_(sim),
      positions_(std::move(positions)),
      cfg_(cfg),
      backoff_rng_(std::move(backoff_rng)),
      nodes_(node_count) {
  if (cfg_.range <= 0.0) throw std::invalid_argument("medium range must be positive");
  if (cfg_.bitrate <= 0.0 || cfg_.broadcast_bitrate <= 0.0) {
    throw std::invalid_argument("medium bitrate must be positive");
  }
  if (cfg_.queue_capacity < 1) throw std::invalid_argument("queue capacity must be at least 1");
}

std::vector<NodeId> Medium::neighbors(NodeId node, engine::SimTime t) const {
  std::vector<NodeId> out;
  const Vec3 p = position(node, t);
  const double r2 = cfg_.range * cfg_.range;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (i != node && distance_squared(p, position(static_cast<NodeId>(i), t)) <= r2) out.push_back(static_cast<NodeId>(i));
  }
  return out;
}

bool Medium::in_range(NodeId a, NodeId b, engine::SimTime t) const {
  return distance_squared(position(a, t), position(b, t)) <= cfg_.range * cfg_.range;
}

double Medium::airtime(std::uint32_t size_bytes, bool broadcast) const {
  return cfg_.frame_overhead + static_cast<double>(size_bytes) * 8.0 / (broadcast ? cfg_.broadcast_bitrate : cfg_.bitrate);
}

EnqueueResult Medium::enqueue(NodeId node, Frame frame) {
  NodeState& st = nodes_.at(node);
  ++st.counters.offered;
  frame.link_src = node;
  frame.enqueue_time = sim_.now();
  if (frame.size == 0) frame.size = cfg_.frame_size(frame.payload);
  if (st.queue.size() >= cfg_.queue_capacity) {
    ++st.counters.dropped_overflow;
    log(node, "drop_overflow", frame);
    if (overflow_) overflow_(node, frame);
    return EnqueueResult::dropped_overflow;
  }
  log(node, "enqueue", frame);
  st.queue.push_back(std::move(frame));
  if (!st.transmitting && !st.attempt_scheduled) try_transmit(node);
  return EnqueueResult::accepted;
}

void Medium::try_transmit(NodeId node) {
  NodeState& st = nodes_[node];
  st.attempt_scheduled = false;
  if (st.transmitting || st.queue.empty()) return;

  const engine::SimTime now = sim_.now();
  const double r2 = cfg_.range * cfg_.range;
  // Carrier sense: wait for the last audible transmission to end, then back off.
  engine::SimTime idle_at = -1.0;
  if (!on_air_.empty()) {
    const Vec3 here = position(node, now);
    for (NodeId i : on_air_) {
      if (distance_squared(here, position(i, now)) <= r2) idle_at = std::max(idle_at, nodes_[i].busy_until);
    }
  }
  if (idle_at >= 0.0) {
    ++st.counters.deferrals;
    st.attempt_scheduled = true;
    const double wait = std::max(0.0, idle_at - now) + backoff_rng_.uniform_open_closed(cfg_.backoff_max);
    sim_.schedule_in(wait, [this, node] { try_transmit(node); }, engine::EventKind::timer_expiry);
    return;
  }

  st.on_air = std::move(st.queue.front());
  st.queue.pop_front();
  st.transmitting = true;
  on_air_.push_back(node);
  const double duration = airtime(st.on_air.size, st.on_air.is_broadcast());
  st.busy_until = now + duration;
  st.counters.airtime += duration;
  if (st.on_air.is_broadcast()) {
    st.receivers = neighbors(node, now);
  }
  double delay = duration;
  if (cfg_.propagation) delay += cfg_.range / kSpeedOfLight;
  log(node, "tx_start", st.on_air);
  sim_.schedule_in(delay, [this, node] { finish_transmission(node); }, engine::EventKind::frame_delivery);
}

void Medium::finish_transmission(NodeId node) {
  NodeState& st = nodes_[node];
  st.transmitting = false;
  on_air_.erase(std::find(on_air_.begin(), on_air_.end(), node));
  Frame frame = std::move(st.on_air);
  std::vector<NodeId> receivers = std::move(st.receivers);
  st.receivers.clear();

  if (frame.is_broadcast()) {
    ++st.counters.delivered;
    log(node, "tx_broadcast", frame);
    if (receive_) {
      for (NodeId r : receivers) receive_(r, frame);
    }
  } else if (in_range(node, frame.link_dst, sim_.now())) {
    ++st.counters.delivered;
    log(node, "tx_delivered", frame);
    if (receive_) receive_(frame.link_dst, frame);
  } else {
    ++st.counters.lost_range;
    log(node, "tx_lost_range", frame);
    if (link_break_) link_break_(node, frame);
  }

  NodeState& after = nodes_[node];
  if (!after.transmitting && !after.attempt_scheduled && !after.queue.empty()) try_transmit(node);
}

NodeCounters Medium::totals() const {
  NodeCounters t;
  for (const auto& n : nodes_) {
    t.offered += n.counters.offered;
    t.delivered += n.counters.delivered;
    t.dropped_overflow += n.counters.dropped_overflow;
    t.lost_range += n.counters.lost_range;
    t.deferrals += n.counters.deferrals;
    t.airtime += n.counters.airtime;
  }
  return t;
}

std::size_t Medium::in_flight(NodeId node) const {
  const NodeState& st = nodes_.at(node);
  return st.queue.size() + (st.transmitting ? 1 : 0);
}

void Medium::for_each_in_flight(const std::function<void(NodeId, const Frame&)>& fn) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const NodeState& st = nodes_[i];
    if (st.transmitting) fn(static_cast<NodeId>(i), st.on_air);
    for (const Frame& f : st.queue) fn(static_cast<NodeId>(i), f);
  }
}

void Medium::log(NodeId node, const char* event, const Frame& frame) const {
  if (log_ == nullptr) return;
  *log_ << sim_.now() << ',' << node << ',' << event << ',' << to_string(frame.kind) << ','
        << frame.size << '\n';
}

}  // namespace fanet::medium
