#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fanet/aodv/agent.hpp"
#include "fanet/engine/rng.hpp"
#include "fanet/engine/simulator.hpp"
#include "fanet/medium/frame.hpp"

namespace fanet::adversary {

enum class AttackKind : std::uint8_t { none, sinkhole, dropping, blackhole, flooding };
enum class Placement : std::uint8_t { random, on_active_route };

std::string_view to_string(AttackKind kind);
std::string_view to_string(Placement placement);
std::optional<AttackKind> parse_attack_kind(std::string_view text);
std::optional<Placement> parse_placement(std::string_view text);

struct AttackConfig {
  AttackKind kind = AttackKind::none;
  double ratio = 0.0;
  Placement placement = Placement::random;
  /// 1.0 drops every relayed data packet; below 1.0 is a grayhole.
  double drop_probability = 1.0;
  std::uint32_t seq_boost = 100;
  std::uint32_t flood_burst = 10;
  double flood_period = 3.0;
  double flood_start = 10.0;
  /// Target ids that do not belong to any node.
  bool flood_nonexistent_targets = false;
  /// When relays are snapshotted for on-route placement.
  double snapshot_time = 20.0;
  /// Select the whole eligible pool instead of failing when the ratio asks
  /// for more attackers than there are eligible nodes.
  bool cap_at_pool = false;
};

struct AttackerSet {
  std::vector<NodeId> ids;
  /// True when on-route placement found no relays and fell back to random.
  bool fell_back_to_random = false;
  /// True when cap_at_pool trimmed the requested count.
  bool capped = false;

  [[nodiscard]] bool contains(NodeId id) const;
  [[nodiscard]] std::size_t size() const { return ids.size(); }
  [[nodiscard]] bool empty() const { return ids.empty(); }
};

/// max(1, round_half_up(total_nodes * ratio)); zero when ratio is zero.
std::size_t attacker_count(std::size_t total_nodes, double ratio);

/// Picks attackers from `eligible`. The draw order depends only on the rng,
/// never on the ratio, so a larger ratio always extends a smaller one.
/// `relays` (on-route placement) are taken first, in random order; the rest
/// of the eligible pool follows in random order.
AttackerSet select_attackers(std::size_t total_nodes, std::span<const NodeId> eligible, const AttackConfig& cfg,
                             engine::RngStream& rng, std::span<const NodeId> relays = {});

/// Nodes that currently forward for any of the (source, destination) pairs,
/// found by walking installed usable routes. Endpoints and `excluded` ids are
/// left out.
std::vector<NodeId> snapshot_active_relays(std::span<const aodv::Agent> agents,
                                           std::span<const std::pair<NodeId, NodeId>> pairs,
                                           std::span<const NodeId> excluded, engine::SimTime now);

/// Fake RREP: one hop from the destination with a sequence number boosted
/// above the requested one.
Rrep sinkhole_on_rreq(const Rreq& rreq, std::uint32_t seq_boost, double lifetime);

/// True if the relayed data packet is dropped.
bool dropping_on_data(double drop_probability, engine::RngStream& rng);

/// Routing-layer overlay for every attacker of one run.
class AttackBehavior : public aodv::Hooks {
 public:
  AttackBehavior(AttackConfig cfg, AttackerSet attackers, std::size_t node_count, double route_lifetime,
                 engine::RngStream drop_rng);

  [[nodiscard]] bool is_attacker(NodeId id) const { return id < member_.size() && member_[id]; }
  [[nodiscard]] const AttackerSet& attackers() const { return attackers_; }
  [[nodiscard]] std::uint64_t dropped() const { return dropped_; }
  [[nodiscard]] std::uint64_t relayed_seen() const { return relayed_seen_; }

  [[nodiscard]] bool forges_replies(NodeId self) const override;
  Rrep forge_reply(NodeId self, const Rreq& rreq) override;
  bool drop_relayed_data(NodeId self, const DataPacket& packet) override;
  [[nodiscard]] bool discover_when_relaying(NodeId self) const override;

 private:
  AttackConfig cfg_;
  AttackerSet attackers_;
  std::vector<bool> member_;
  double route_lifetime_;
  engine::RngStream drop_rng_;
  std::uint64_t dropped_ = 0;
  std::uint64_t relayed_seen_ = 0;
};

/// Periodic RREQ bursts from flooding attackers.
class Flooder {
 public:
  Flooder(AttackConfig cfg, std::vector<aodv::Agent*> attackers, std::size_t node_count, engine::RngStream rng);

  /// Schedules the first burst of every attacker at cfg.flood_start.
  void attach(engine::Simulator& sim, engine::SimTime t_end);

  /// One burst from `attacker`: a random target and flood_burst fresh RREQs.
  /// Returns the target id.
  NodeId flooding_tick(aodv::Agent& attacker);

  [[nodiscard]] std::uint64_t bursts() const { return bursts_; }
  [[nodiscard]] std::uint64_t rreqs() const { return rreqs_; }

 private:
  void schedule_tick(engine::Simulator& sim, std::size_t index, engine::SimTime at, engine::SimTime t_end);

  AttackConfig cfg_;
  std::vector<aodv::Agent*> attackers_;
  std::size_t node_count_;
  engine::RngStream rng_;
  std::uint64_t bursts_ = 0;
  std::uint64_t rreqs_ = 0;
};

}  // namespace fanet::adversary
