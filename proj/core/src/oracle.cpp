#include "fanet/harness/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <memory>

#include "fanet/engine/rng.hpp"
#include "fanet/engine/simulator.hpp"

namespace fanet::harness {
namespace {

double euclid(const Vec3& a, const Vec3& b) {
  return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

// A frozen network: fixed positions, one agent per node, no traffic generator.
struct StaticNet {
  engine::Simulator sim;
  std::vector<Vec3> positions;
  std::unique_ptr<medium::Medium> medium;
  aodv::AgentContext ctx;
  std::vector<aodv::Agent> agents;

  StaticNet(std::vector<Vec3> pos, const medium::MediumConfig& mc, const aodv::AodvConfig& ac, std::uint64_t seed)
      : positions(std::move(pos)) {
    const std::size_t n = positions.size();
    medium = std::make_unique<medium::Medium>(
        sim, n, [this](NodeId id, engine::SimTime) { return positions[id]; }, mc,
        engine::RngStream(seed, "backoff"));
    ctx.sim = &sim;
    ctx.medium = medium.get();
    ctx.config = ac;
    ctx.node_count = n;
    agents.reserve(n);
    for (std::size_t i = 0; i < n; ++i) agents.emplace_back(static_cast<NodeId>(i), &ctx);
    medium->on_receive([this](NodeId r, const Frame& f) { agents[r].receive(f); });
    medium->on_link_break([this](NodeId s, const Frame& f) { agents[s].link_break(f); });
  }
};

}  // namespace

std::vector<int> bfs_hops(std::span<const Vec3> positions, NodeId source, double range) {
  std::vector<int> hops(positions.size(), -1);
  std::deque<NodeId> frontier{source};
  hops.at(source) = 0;
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop_front();
    for (std::size_t v = 0; v < positions.size(); ++v) {
      if (hops[v] >= 0 || euclid(positions[u], positions[v]) > range) continue;
      hops[v] = hops[u] + 1;
      frontier.push_back(static_cast<NodeId>(v));
    }
  }
  return hops;
}

BfsOracleResult bfs_oracle(const BfsOracleConfig& cfg) {
  BfsOracleResult result;
  engine::RngStream place(cfg.seed, "oracle-placement");
  // Long enough for routes and the duplicate cache of one pair to lapse.
  const double gap = cfg.settle + std::max(cfg.aodv.active_route_timeout, cfg.aodv.seen_cache_lifetime) + 1.0;

  for (std::size_t g = 0; g < cfg.graphs; ++g) {
    std::vector<Vec3> pos(cfg.nodes);
    for (Vec3& p : pos) {
      p = Vec3{place.uniform(0.0, cfg.extent.x), place.uniform(0.0, cfg.extent.y), place.uniform(0.0, cfg.extent.z)};
    }
    StaticNet net(pos, cfg.medium, cfg.aodv, cfg.seed + g);
    ++result.graphs;

    engine::SimTime t = 0.0;
    for (std::size_t s = 0; s < cfg.nodes; ++s) {
      const auto expected = bfs_hops(pos, static_cast<NodeId>(s), cfg.medium.range);
      for (std::size_t d = 0; d < cfg.nodes; ++d) {
        if (d == s || expected[d] < 0) continue;
        const auto src = static_cast<NodeId>(s);
        const auto dst = static_cast<NodeId>(d);
        net.sim.schedule(t, [&net, src, dst] { net.agents[src].originate_rreq(dst); });
        net.sim.run_until(t + cfg.settle);
        const aodv::RouteEntry* r = net.agents[src].table().usable(dst, net.sim.now());
        const int installed = r != nullptr ? static_cast<int>(r->hop_count) : -1;
        ++result.pairs;
        if (installed != expected[d]) result.mismatches.push_back(HopMismatch{g, src, dst, expected[d], installed});
        t += gap;
        net.sim.run_until(t);
      }
    }
  }
  return result;
}

ChainResult static_chain(const ChainConfig& cfg) {
  std::vector<Vec3> pos;
  for (std::size_t i = 0; i < cfg.nodes; ++i) pos.push_back(Vec3{static_cast<double>(i) * cfg.spacing, 0.0, 0.0});
  StaticNet net(pos, cfg.medium, cfg.aodv, cfg.seed);

  ChainResult result;
  const auto dst = static_cast<NodeId>(cfg.nodes - 1);
  net.agents[dst].on_deliver([&result](const DataPacket&) { ++result.delivered; });
  const auto count = static_cast<std::uint64_t>(std::floor(cfg.duration));
  for (std::uint64_t k = 0; k < count; ++k) {
    const engine::SimTime at = cfg.start + static_cast<double>(k);
    net.sim.schedule(at, [&net, &result, dst, k, at, &cfg] {
      DataPacket p;
      p.id = k;
      p.source = 0;
      p.destination = dst;
      p.created = at;
      p.ttl = cfg.aodv.data_ttl;
      ++result.sent;
      net.agents[0].send_data(p);
    });
  }
  net.sim.run_until(cfg.start + cfg.duration + cfg.drain);
  if (const aodv::RouteEntry* r = net.agents[0].table().find(dst); r != nullptr && r->present) {
    result.route_hops = r->hop_count;
  }
  return result;
}

}  // namespace fanet::harness
