#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "fanet/engine/rng.hpp"
#include "fanet/engine/simulator.hpp"
#include "fanet/medium/frame.hpp"
#include "fanet/types.hpp"

namespace fanet::medium {

struct MediumConfig {
  double range = 250.0;          // m
  double bitrate = 11e6;         // bit/s, unicast frames
  double broadcast_bitrate = 11e6;  // bit/s, broadcast frames
  std::size_t queue_capacity = 64;
  double backoff_max = 2e-3;     // s
  bool propagation = false;
  /// Fixed cost added to every frame's airtime (inter-frame space and PHY
  /// preamble), s.
  double frame_overhead = 0.0;

  std::uint32_t link_header_bytes = 48;
  std::uint32_t rreq_bytes = 24;
  std::uint32_t rrep_bytes = 20;
  std::uint32_t rerr_bytes = 12;
  /// Each unreachable destination beyond the first adds this many bytes.
  std::uint32_t rerr_entry_bytes = 8;

  /// On-air size of a frame carrying `payload`.
  [[nodiscard]] std::uint32_t frame_size(const Payload& payload) const;
};

/// Nodes within range of `node` at the given positions, excluding itself.
std::vector<NodeId> neighbors(NodeId node, std::span<const Vec3> positions, double range);

enum class EnqueueResult { accepted, dropped_overflow };

struct NodeCounters {
  std::uint64_t offered = 0;
  std::uint64_t delivered = 0;  // unicast received, or broadcast put on air
  std::uint64_t dropped_overflow = 0;
  std::uint64_t lost_range = 0;
  std::uint64_t deferrals = 0;
  double airtime = 0.0;
};

/// Shared wireless medium: unit-disc links, per-node FIFO transmit queue,
/// serialized transmission and neighborhood carrier sense with uniform backoff.
class Medium {
 public:
  using PositionProvider = std::function<Vec3(NodeId, engine::SimTime)>;
  using ReceiveHandler = std::function<void(NodeId receiver, const Frame& frame)>;
  /// Raised when a unicast frame could not reach its link destination.
  using LinkBreakHandler = std::function<void(NodeId sender, const Frame& frame)>;
  using DropHandler = std::function<void(NodeId node, const Frame& frame)>;

  Medium(engine::Simulator& sim, std::size_t node_count, PositionProvider positions,
         MediumConfig cfg, engine::RngStream backoff_rng);

  [[nodiscard]] const MediumConfig& config() const { return cfg_; }
  [[nodiscard]] std::size_t node_count() const { return nodes_.size(); }

  [[nodiscard]] std::vector<NodeId> neighbors(NodeId node, engine::SimTime t) const;
  [[nodiscard]] bool in_range(NodeId a, NodeId b, engine::SimTime t) const;

  /// Seconds on air for a frame of `size_bytes`.
  [[nodiscard]] double airtime(std::uint32_t size_bytes, bool broadcast = false) const;

  EnqueueResult enqueue(NodeId node, Frame frame);

  void on_receive(ReceiveHandler h) { receive_ = std::move(h); }
  void on_link_break(LinkBreakHandler h) { link_break_ = std::move(h); }
  void on_overflow(DropHandler h) { overflow_ = std::move(h); }

  [[nodiscard]] const NodeCounters& counters(NodeId node) const { return nodes_.at(node).counters; }
  [[nodiscard]] NodeCounters totals() const;
  [[nodiscard]] std::size_t in_flight(NodeId node) const;
  [[nodiscard]] std::size_t queue_length(NodeId node) const { return nodes_.at(node).queue.size(); }
  [[nodiscard]] bool transmitting(NodeId node) const { return nodes_.at(node).transmitting; }

  /// Frames still queued or on air, e.g. to account for packets at run end.
  void for_each_in_flight(const std::function<void(NodeId, const Frame&)>& fn) const;

  /// Debug log, CSV rows: time,node,event,kind,size.
  void set_event_log(std::ostream* out) { log_ = out; }

 private:
  struct NodeState {
    std::deque<Frame> queue;
    bool transmitting = false;
    bool attempt_scheduled = false;
    engine::SimTime busy_until = 0.0;
    Frame on_air;
    std::vector<NodeId> receivers;
    NodeCounters counters;
  };

  [[nodiscard]] Vec3 position(NodeId node, engine::SimTime t) const { return positions_(node, t); }

  void try_transmit(NodeId node);
  void finish_transmission(NodeId node);
  void log(NodeId node, const char* event, const Frame& frame) const;

  engine::Simulator& sim_;
  PositionProvider positions_;
  MediumConfig cfg_;
  engine::RngStream backoff_rng_;
  std::vector<NodeState> nodes_;
  std::vector<NodeId> on_air_;  // nodes currently transmitting
  ReceiveHandler receive_;
  LinkBreakHandler link_break_;
  DropHandler overflow_;
  std::ostream* log_ = nullptr;
};

}  // namespace fanet::medium
