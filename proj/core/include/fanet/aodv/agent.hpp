#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <vector>

#include "fanet/aodv/routing_table.hpp"
#include "fanet/engine/simulator.hpp"
#include "fanet/medium/frame.hpp"
#include "fanet/medium/medium.hpp"

namespace fanet::aodv {

struct AodvConfig {
  double active_route_timeout = 3.0;  // s, refreshed on use
  double seen_cache_lifetime = 3.0;   // s
  std::size_t pending_capacity = 32;  // packets per destination
  std::uint8_t data_ttl = 32;
  std::uint8_t net_diameter = 35;
  double node_traversal_time = 0.04;  // s
  int rreq_retries = 2;
  /// A duplicate RREQ that arrives over strictly fewer hops still updates the
  /// reverse route and is passed on, so floods settle on shortest paths even
  /// when MAC backoff reorders copies.
  bool process_shorter_duplicates = true;

  [[nodiscard]] double net_traversal_time() const { return 2.0 * node_traversal_time * net_diameter; }
};

enum class DropReason : std::uint8_t { attacker, overflow, lost_range, no_route, ttl_expired };

/// Callbacks from the routing layer into metrics accounting.
class Observer {
 public:
  virtual ~Observer() = default;
  virtual void data_delivered(NodeId /*at*/, const DataPacket& /*packet*/) {}
  virtual void data_dropped(NodeId /*at*/, const DataPacket& /*packet*/, DropReason /*reason*/) {}
  virtual void frame_received(NodeId /*at*/, const Frame& /*frame*/) {}
  virtual void rreq_originated(NodeId /*at*/, const Rreq& /*rreq*/) {}
};

/// Behavior overlay consulted at the points where an attacker deviates from
/// honest AODV. The default implementation is honest.
class Hooks {
 public:
  virtual ~Hooks() = default;
  /// Whether this node answers RREQs with forged replies instead of
  /// forwarding them. Destination-only RREQs are never forged against.
  [[nodiscard]] virtual bool forges_replies(NodeId /*self*/) const { return false; }
  /// The fake reply sent back for a fresh RREQ when forges_replies() holds.
  virtual Rrep forge_reply(NodeId /*self*/, const Rreq& rreq) { return Rrep{rreq.destination}; }
  /// Whether a data packet this node should relay is silently discarded.
  virtual bool drop_relayed_data(NodeId /*self*/, const DataPacket& /*packet*/) { return false; }
  /// Relay without a route: buffer and discover instead of drop + RERR.
  [[nodiscard]] virtual bool discover_when_relaying(NodeId /*self*/) const { return false; }
};

struct AgentCounters {
  std::uint64_t rreq_originated = 0;
  std::uint64_t rreq_forwarded = 0;
  std::uint64_t rreq_duplicates = 0;
  std::uint64_t rrep_originated = 0;
  std::uint64_t rrep_forged = 0;
  std::uint64_t rrep_withheld = 0;
  std::uint64_t rrep_forwarded = 0;
  std::uint64_t rrep_dropped_no_reverse = 0;
  std::uint64_t rerr_sent = 0;
  std::uint64_t discoveries_failed = 0;
};

class Agent;

/// Shared services for every agent of one run.
struct AgentContext {
  engine::Simulator* sim = nullptr;
  medium::Medium* medium = nullptr;
  AodvConfig config;
  Observer* observer = nullptr;
  std::size_t node_count = 0;
};

/// AODV state machine of a single node.
class Agent {
 public:
  Agent(NodeId self, AgentContext* ctx);

  [[nodiscard]] NodeId id() const { return self_; }
  [[nodiscard]] const RoutingTable& table() const { return table_; }
  [[nodiscard]] const AgentCounters& counters() const { return counters_; }
  [[nodiscard]] std::uint32_t own_seq() const { return own_seq_; }
  [[nodiscard]] bool discovering(NodeId dest) const;
  [[nodiscard]] std::size_t pending_count(NodeId dest) const;

  void set_hooks(Hooks* hooks) { hooks_ = hooks; }
  /// Invoked when a data packet reaches this node as its final destination.
  void on_deliver(std::function<void(const DataPacket&)> fn) { deliver_ = std::move(fn); }

  /// Application send. Returns true if the packet went straight to the MAC.
  bool send_data(DataPacket packet);

  /// Starts a network-wide route discovery with a fresh RREQ id.
  void originate_rreq(NodeId dest, bool destination_only = false);

  // Medium upcalls.
  void receive(const Frame& frame);
  void link_break(const Frame& frame);

  /// Frames and buffered packets still held here at run end.
  void for_each_pending(const std::function<void(const DataPacket&)>& fn) const;

  /// Test access: install a route directly.
  void install_route(NodeId dest, NodeId next_hop, std::uint32_t hops, std::uint32_t seq, engine::SimTime expiry);

 private:
  struct Discovery {
    bool active = false;
    bool destination_only = false;
    int attempts = 0;
    engine::EventHandle timer;
  };

  void handle_rreq(const Rreq& rreq, NodeId from);
  void handle_rrep(const Rrep& rrep, NodeId from);
  void handle_rerr(const Rerr& rerr, NodeId from);
  void handle_data(const DataPacket& packet, NodeId from);

  void forward_data(DataPacket packet);
  void buffer(DataPacket packet, bool destination_only);
  void start_discovery(NodeId dest, bool destination_only);
  void discovery_timeout(NodeId dest);
  void flush_pending(NodeId dest);
  void send_unicast(NodeId next_hop, Payload payload, FrameKind kind);
  void send_broadcast(Payload payload, FrameKind kind);
  void send_rerr(std::vector<Unreachable> entries);
  void enqueue_data(NodeId next_hop, DataPacket packet);
  void reply_as_destination(const Rreq& rreq, NodeId from, bool bump_seq);

  [[nodiscard]] engine::SimTime now() const { return ctx_->sim->now(); }
  [[nodiscard]] const AodvConfig& cfg() const { return ctx_->config; }

  NodeId self_;
  AgentContext* ctx_;
  Hooks* hooks_ = nullptr;
  RoutingTable table_;
  std::uint32_t own_seq_ = 0;
  std::uint32_t next_rreq_id_ = 0;
  struct Seen {
    std::uint32_t rreq_id;
    engine::SimTime expiry;
    std::uint32_t hops;  // best hop count seen
  };
  // Recently seen floods, one short list per originator.
  std::vector<std::vector<Seen>> seen_;
  Seen* find_seen(NodeId originator, std::uint32_t rreq_id);
  void remember(NodeId originator, std::uint32_t rreq_id, std::uint32_t hops);
  std::vector<std::deque<DataPacket>> pending_;
  std::vector<Discovery> discovery_;
  std::function<void(const DataPacket&)> deliver_;
  AgentCounters counters_;
};

}  // namespace fanet::aodv
