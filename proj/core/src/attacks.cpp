#include "fanet/adversary/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fanet::adversary {

std::string_view to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::none: return "none";
    case AttackKind::sinkhole: return "sinkhole";
    case AttackKind::dropping: return "dropping";
    case AttackKind::blackhole: return "blackhole";
    case AttackKind::flooding: return "flooding";
  }
  return "none";
}

std::string_view to_string(Placement placement) {
  return placement == Placement::random ? "random" : "on_active_route";
}

std::optional<AttackKind> parse_attack_kind(std::string_view text) {
  for (auto k : {AttackKind::none, AttackKind::sinkhole, AttackKind::dropping, AttackKind::blackhole,
                 AttackKind::flooding}) {
    if (text == to_string(k)) return k;
  }
  return std::nullopt;
}

std::optional<Placement> parse_placement(std::string_view text) {
  if (text == "random") return Placement::random;
  if (text == "on_active_route") return Placement::on_active_route;
  return std::nullopt;
}

bool AttackerSet::contains(NodeId id) const {
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

std::size_t attacker_count(std::size_t total_nodes, double ratio) {
  if (ratio <= 0.0) return 0;
  // Nudge before flooring so that e.g. 50 * 0.1 = 5.000000000000001 or
  // 4.999999999 both land on 5.
  const double scaled = static_cast<double>(total_nodes) * ratio;
  const auto rounded = static_cast<std::size_t>(std::floor(scaled + 0.5 + 1e-9));
  return std::max<std::size_t>(1, rounded);
}

namespace {

std::vector<NodeId> shuffled(std::vector<NodeId> ids, engine::RngStream& rng) {
  // Fisher-Yates with the stream's own integer draws.
  for (std::size_t i = ids.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(i - 1)));
    std::swap(ids[i - 1], ids[j]);
  }
  return ids;
}

}  // namespace

AttackerSet select_attackers(std::size_t total_nodes, std::span<const NodeId> eligible, const AttackConfig& cfg,
                             engine::RngStream& rng, std::span<const NodeId> relays) {
  AttackerSet out;
  std::size_t count = attacker_count(total_nodes, cfg.ratio);
  if (count == 0 || cfg.kind == AttackKind::none) return out;
  if (eligible.size() < count && cfg.cap_at_pool && !eligible.empty()) {
    count = eligible.size();
    out.capped = true;
  }
  if (eligible.size() < count) {
    throw std::invalid_argument("eligible attacker pool (" + std::to_string(eligible.size()) +
                                ") smaller than attacker count (" + std::to_string(count) + ")");
  }

  std::vector<NodeId> order;
  if (cfg.placement == Placement::on_active_route) {
    std::vector<NodeId> on_route;
    std::vector<NodeId> rest;
    for (NodeId id : eligible) {
      (std::find(relays.begin(), relays.end(), id) != relays.end() ? on_route : rest).push_back(id);
    }
    out.fell_back_to_random = on_route.empty();
    order = shuffled(std::move(on_route), rng);
    const auto tail = shuffled(std::move(rest), rng);
    order.insert(order.end(), tail.begin(), tail.end());
  } else {
    order = shuffled(std::vector<NodeId>(eligible.begin(), eligible.end()), rng);
  }
  out.ids.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count));
  return out;
}

std::vector<NodeId> snapshot_active_relays(std::span<const aodv::Agent> agents,
                                           std::span<const std::pair<NodeId, NodeId>> pairs,
                                           std::span<const NodeId> excluded, engine::SimTime now) {
  std::vector<bool> skip(agents.size(), false);
  for (NodeId id : excluded) {
    if (id < skip.size()) skip[id] = true;
  }
  for (const auto& [src, dst] : pairs) {
    if (src < skip.size()) skip[src] = true;
    if (dst < skip.size()) skip[dst] = true;
  }

  std::vector<bool> relay(agents.size(), false);
  for (const auto& [src, dst] : pairs) {
    NodeId at = src;
    for (std::size_t hops = 0; hops < agents.size() && at != dst; ++hops) {
      const aodv::RouteEntry* r = agents[at].table().usable(dst, now);
      if (r == nullptr) break;
      at = r->next_hop;
      if (at != dst && at < relay.size()) relay[at] = true;
    }
  }

  std::vector<NodeId> out;
  for (std::size_t i = 0; i < relay.size(); ++i) {
    if (relay[i] && !skip[i]) out.push_back(static_cast<NodeId>(i));
  }
  return out;
}

Rrep sinkhole_on_rreq(const Rreq& rreq, std::uint32_t seq_boost, double lifetime) {
  Rrep fake;
  fake.destination = rreq.destination;
  fake.dest_seq = (rreq.unknown_seq ? 0U : rreq.last_known_dest_seq) + seq_boost;
  fake.originator = rreq.originator;
  fake.hop_count = 1;
  fake.lifetime = lifetime;
  return fake;
}

bool dropping_on_data(double drop_probability, engine::RngStream& rng) {
  if (drop_probability >= 1.0) return true;
  if (drop_probability <= 0.0) return false;
  return rng.bernoulli(drop_probability);
}

AttackBehavior::AttackBehavior(AttackConfig cfg, AttackerSet attackers, std::size_t node_count,
                               double route_lifetime, engine::RngStream drop_rng)
    : cfg_(cfg),
      attackers_(std::move(attackers)),
      member_(node_count, false),
      route_lifetime_(route_lifetime),
      drop_rng_(std::move(drop_rng)) {
  for (NodeId id : attackers_.ids) {
    if (id < member_.size()) member_[id] = true;
  }
}

bool AttackBehavior::forges_replies(NodeId self) const {
  return is_attacker(self) && (cfg_.kind == AttackKind::sinkhole || cfg_.kind == AttackKind::blackhole);
}

Rrep AttackBehavior::forge_reply(NodeId /*self*/, const Rreq& rreq) {
  return sinkhole_on_rreq(rreq, cfg_.seq_boost, route_lifetime_);
}

bool AttackBehavior::drop_relayed_data(NodeId self, const DataPacket& /*packet*/) {
  if (!is_attacker(self)) return false;
  if (cfg_.kind == AttackKind::blackhole) {
    ++relayed_seen_;
    ++dropped_;
    return true;
  }
  if (cfg_.kind != AttackKind::dropping) return false;
  ++relayed_seen_;
  const bool drop = dropping_on_data(cfg_.drop_probability, drop_rng_);
  if (drop) ++dropped_;
  return drop;
}

bool AttackBehavior::discover_when_relaying(NodeId self) const {
  return is_attacker(self) && cfg_.kind == AttackKind::sinkhole;
}

Flooder::Flooder(AttackConfig cfg, std::vector<aodv::Agent*> attackers, std::size_t node_count,
                 engine::RngStream rng)
    : cfg_(cfg), attackers_(std::move(attackers)), node_count_(node_count), rng_(std::move(rng)) {
  if (cfg_.flood_burst < 1) throw std::invalid_argument("flood_burst must be at least 1");
  if (cfg_.flood_period <= 0.0) throw std::invalid_argument("flood_period must be positive");
}

void Flooder::attach(engine::Simulator& sim, engine::SimTime t_end) {
  for (std::size_t i = 0; i < attackers_.size(); ++i) {
    const engine::SimTime start = std::max(cfg_.flood_start, sim.now());
    if (start <= t_end) schedule_tick(sim, i, start, t_end);
  }
}

void Flooder::schedule_tick(engine::Simulator& sim, std::size_t index, engine::SimTime at, engine::SimTime t_end) {
  sim.schedule(
      at,
      [this, &sim, index, at, t_end] {
        flooding_tick(*attackers_[index]);
        const engine::SimTime next = at + cfg_.flood_period;
        if (next <= t_end) schedule_tick(sim, index, next, t_end);
      },
      engine::EventKind::attack_burst);
}

NodeId Flooder::flooding_tick(aodv::Agent& attacker) {
  NodeId target;
  if (cfg_.flood_nonexistent_targets) {
    target = static_cast<NodeId>(node_count_ + static_cast<std::size_t>(rng_.integer(0, 999)));
  } else {
    // Uniform over every other node.
    const auto pick = static_cast<NodeId>(rng_.integer(0, static_cast<std::int64_t>(node_count_) - 2));
    target = pick >= attacker.id() ? pick + 1 : pick;
  }
  ++bursts_;
  for (std::uint32_t i = 0; i < cfg_.flood_burst; ++i) {
    attacker.originate_rreq(target);
    ++rreqs_;
  }
  return target;
}

}  // namespace fanet::adversary
