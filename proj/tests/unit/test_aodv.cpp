#include <doctest.h>

#include <algorithm>

#include "fanet/aodv/routing_table.hpp"
#include "fanet/harness/config.hpp"
#include "fanet/harness/oracle.hpp"
#include "fanet/harness/simulation.hpp"
#include "static_world.hpp"

using namespace fanet;
using namespace fanet::aodv;
using fanet::testing::line;
using fanet::testing::StaticWorld;

namespace {

RouteCandidate candidate(std::uint32_t seq, std::uint32_t hops) { return RouteCandidate{7, hops, seq, true, 100.0}; }

Frame rreq_from(NodeId from, const Rreq& r) {
  Frame f;
  f.kind = FrameKind::rreq;
  f.link_src = from;
  f.payload = r;
  return f;
}

std::vector<Rerr> rerrs_heard(const StaticWorld& w) {
  std::vector<Rerr> out;
  for (const auto& [at, f] : w.rec.frames) {
    if (const auto* e = std::get_if<Rerr>(&f.payload)) out.push_back(*e);
  }
  return out;
}

}  // namespace

TEST_CASE("route selection: freshness first, then hop count") {
  RoutingTable t(8);
  SUBCASE("higher sequence replaces a shorter route") {
    t.offer(3, candidate(5, 3), 0.0);
    CHECK(t.offer(3, candidate(7, 5), 0.0));
    CHECK(t.find(3)->hop_count == 5);
  }
  SUBCASE("equal sequence, fewer hops replaces") {
    t.offer(3, candidate(7, 5), 0.0);
    CHECK(t.offer(3, candidate(7, 2), 0.0));
    CHECK(t.find(3)->hop_count == 2);
  }
  SUBCASE("staler sequence never wins") {
    t.offer(3, candidate(7, 2), 0.0);
    CHECK_FALSE(t.offer(3, candidate(5, 1), 0.0));
    CHECK(t.find(3)->dest_seq == 7);
    CHECK(t.find(3)->hop_count == 2);
  }
}

TEST_CASE("send_data with a route goes straight to the next hop") {
  StaticWorld w(line(2, 100.0));
  w.agents[0].install_route(1, 1, 1, 5, 100.0);
  w.at(1.0, [&] { CHECK(w.agents[0].send_data(w.packet(0, 1))); });
  w.run(2.0);
  CHECK(w.rec.rreqs.empty());
  REQUIRE(w.rec.delivered.size() == 1);
  CHECK(w.rec.delivered[0].first == 1);
}

TEST_CASE("send_data without a route floods once and holds the data") {
  StaticWorld w(line(3, 200.0));
  w.at(1.0, [&] {
    CHECK_FALSE(w.agents[0].send_data(w.packet(0, 2, 10)));
    CHECK_FALSE(w.agents[0].send_data(w.packet(0, 2, 11)));
    CHECK(w.agents[0].pending_count(2) == 2);
    CHECK(w.agents[0].discovering(2));
  });
  w.run(3.0);
  CHECK(w.rec.rreqs.size() == 1);
  CHECK(w.agents[0].pending_count(2) == 0);
  REQUIRE(w.rec.delivered.size() == 2);
  CHECK(w.rec.delivered[0].second.id == 10);
  CHECK(w.rec.delivered[1].second.id == 11);
}

TEST_CASE("pending buffer overflow drops the oldest packet") {
  AodvConfig cfg;
  cfg.pending_capacity = 2;
  StaticWorld w(line(3, 200.0), {}, cfg);
  w.at(1.0, [&] {
    for (std::uint64_t id = 0; id < 3; ++id) w.agents[0].send_data(w.packet(0, 2, id));
  });
  w.run(3.0);
  REQUIRE(w.rec.dropped.size() == 1);
  CHECK(w.rec.dropped[0].first.id == 0);
  CHECK(w.rec.dropped[0].second == DropReason::overflow);
  CHECK(w.rec.delivered.size() == 2);
}

TEST_CASE("duplicate RREQs are discarded") {
  StaticWorld w(line(3, 200.0));
  Rreq r;
  r.originator = 0;
  r.rreq_id = 5;
  r.destination = 2;
  w.at(1.0, [&] {
    w.agents[1].receive(rreq_from(0, r));
    w.agents[1].receive(rreq_from(0, r));
  });
  w.run(1.5);
  CHECK(w.agents[1].counters().rreq_forwarded == 1);
  CHECK(w.agents[1].counters().rreq_duplicates == 1);
}

TEST_CASE("destination replies with a fresh sequence number and hop count 0") {
  StaticWorld w(line(3, 200.0));
  Rreq r;
  r.originator = 0;
  r.orig_seq = 1;
  r.rreq_id = 1;
  r.destination = 2;
  r.last_known_dest_seq = 4;
  r.unknown_seq = false;
  r.hop_count = 1;
  // Node 1 holds the reverse route the flood would have left behind.
  w.agents[1].install_route(0, 0, 1, 1, 100.0);
  w.at(1.0, [&] { w.agents[2].receive(rreq_from(1, r)); });
  w.run(1.5);
  CHECK(w.agents[2].own_seq() == 5);
  const auto it = std::find_if(w.rec.frames.begin(), w.rec.frames.end(),
                               [](const auto& e) { return e.second.kind == FrameKind::rrep; });
  REQUIRE(it != w.rec.frames.end());
  CHECK(it->first == 1);
  const auto& rrep = std::get<Rrep>(it->second.payload);
  CHECK(rrep.dest_seq == 5);
  CHECK(rrep.hop_count == 0);
  // The reply travels on to the originator, who now routes over two hops.
  REQUIRE(w.agents[0].table().usable(2, w.sim.now()) != nullptr);
  CHECK(w.agents[0].table().usable(2, w.sim.now())->hop_count == 2);
}

TEST_CASE("intermediate node with a fresh route replies") {
  StaticWorld w(line(4, 200.0));
  w.agents[1].install_route(3, 2, 2, 9, 100.0);
  w.agents[0].install_route(3, 1, 3, 7, 0.0);  // known but expired: requests seq 7
  w.at(1.0, [&] { w.agents[0].originate_rreq(3); });
  w.run(2.0);
  CHECK(w.rec.rreqs.at(0).second.last_known_dest_seq == 7);
  CHECK(w.agents[1].counters().rrep_originated == 1);
  CHECK(w.agents[3].counters().rrep_originated == 0);
  CHECK(w.agents[1].counters().rreq_forwarded == 0);
  const RouteEntry* r = w.agents[0].table().usable(3, w.sim.now());
  REQUIRE(r != nullptr);
  CHECK(r->dest_seq == 9);
  CHECK(r->hop_count == 3);
}

TEST_CASE("link break invalidates routes and reports them") {
  StaticWorld w({{0, 0, 0}, {200, 0, 0}, {0, 200, 0}, {0, -200, 0}, {-200, 0, 0}});
  Frame lost;
  lost.kind = FrameKind::data;
  lost.link_dst = 1;
  lost.payload = DataPacket{};
  SUBCASE("one route") {
    w.agents[0].install_route(2, 1, 3, 4, 100.0);
    w.at(1.0, [&] { w.agents[0].link_break(lost); });
    w.run(1.5);
    const auto heard = rerrs_heard(w);
    REQUIRE_FALSE(heard.empty());
    CHECK(heard[0].unreachable.size() == 1);
  }
  SUBCASE("three routes") {
    for (NodeId d : {2U, 3U, 4U}) w.agents[0].install_route(d, 1, 3, 4, 100.0);
    w.at(1.0, [&] { w.agents[0].link_break(lost); });
    w.run(1.5);
    const auto heard = rerrs_heard(w);
    REQUIRE_FALSE(heard.empty());
    CHECK(heard[0].unreachable.size() == 3);
    for (NodeId d : {2U, 3U, 4U}) CHECK(w.agents[0].table().usable(d, w.sim.now()) == nullptr);
  }
}

TEST_CASE("relay without a route drops and sends RERR") {
  StaticWorld w(line(3, 200.0));
  w.agents[0].install_route(2, 1, 2, 3, 100.0);
  w.at(1.0, [&] { w.agents[0].send_data(w.packet(0, 2)); });
  w.run(1.5);
  REQUIRE(w.rec.dropped.size() == 1);
  CHECK(w.rec.dropped[0].second == DropReason::no_route);
  CHECK_FALSE(rerrs_heard(w).empty());
  CHECK(w.agents[0].table().usable(2, w.sim.now()) == nullptr);
}

TEST_CASE("a routing loop dies at the TTL") {
  StaticWorld w({{0, 0, 0}, {200, 0, 0}, {2000, 0, 0}});
  w.agents[0].install_route(2, 1, 2, 3, 100.0);
  w.agents[1].install_route(2, 0, 2, 3, 100.0);
  w.at(1.0, [&] { w.agents[0].send_data(w.packet(0, 2)); });
  w.run(5.0);
  REQUIRE(w.rec.dropped.size() == 1);
  CHECK(w.rec.dropped[0].second == DropReason::ttl_expired);
  CHECK(w.rec.received[FrameKind::data] == 32);
  CHECK(w.rec.delivered.empty());
}

TEST_CASE("broken route is rediscovered over the other side of a diamond") {
  // 0 reaches 3 through either 1 or 4, both via 2.
  StaticWorld w({{0, 0, 0}, {200, 100, 0}, {400, 0, 0}, {600, 0, 0}, {200, -100, 0}});
  for (int k = 0; k < 40; ++k) {
    const double t = 1.0 + k;
    w.at(t, [&w, k] { w.agents[0].send_data(w.packet(0, 3, static_cast<std::uint64_t>(k))); });
  }
  NodeId first_hop = kNoNode;
  w.run(10.5);
  const RouteEntry* before = w.agents[0].table().usable(3, w.sim.now());
  REQUIRE(before != nullptr);
  first_hop = before->next_hop;
  REQUIRE((first_hop == 1 || first_hop == 4));
  w.pos[first_hop] = {200, 5000, 0};
  w.run(40.5);
  const RouteEntry* now = w.agents[0].table().usable(3, w.sim.now());
  REQUIRE(now != nullptr);
  CHECK(now->next_hop != first_hop);
  w.run(45.0);
  const auto after = std::count_if(w.rec.delivered.begin(), w.rec.delivered.end(),
                                   [](const auto& d) { return d.second.id >= 12; });
  CHECK(after == 28);
  CHECK(w.rec.rreqs.size() >= 2);
}

TEST_CASE("no traffic, no route discovery") {
  engine::RngStream rng(3, "placement");
  std::vector<Vec3> p(15);
  for (auto& v : p) v = {rng.uniform(0, 700), rng.uniform(0, 700), rng.uniform(0, 100)};
  StaticWorld w(p);
  w.run(300.0);
  CHECK(w.rec.rreqs.empty());
  CHECK(w.rec.frames.empty());
}

TEST_CASE("stored sequence numbers never decrease") {
  harness::ScenarioConfig cfg;
  cfg.nodes = 25;
  cfg.sim_time = 120.0;
  const auto resolved = cfg.for_run(3);
  harness::Network net(resolved, {});
  std::vector<std::vector<std::uint32_t>> last(resolved.nodes, std::vector<std::uint32_t>(resolved.nodes, 0));
  std::size_t checked = 0;
  for (double t = 1.0; t <= resolved.sim_time; t += 0.5) {
    net.run_until(t);
    for (const auto& a : net.agents()) {
      for (const RouteEntry& e : a.table().entries()) {
        if (!e.present || !e.seq_known) continue;
        REQUIRE(e.dest_seq >= last[a.id()][e.destination]);
        last[a.id()][e.destination] = e.dest_seq;
        ++checked;
      }
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("BFS helper") {
  const auto h = harness::bfs_hops(line(5, 200.0), 0, 250.0);
  CHECK(h == std::vector<int>{0, 1, 2, 3, 4});
  const auto cut = harness::bfs_hops(std::vector<Vec3>{{0, 0, 0}, {300, 0, 0}}, 0, 250.0);
  CHECK(cut == std::vector<int>{0, -1});
}

TEST_CASE("installed hop counts equal BFS shortest paths") {
  harness::BfsOracleConfig cfg;
  cfg.medium = harness::reference_medium();
  const auto result = harness::bfs_oracle(cfg);
  CHECK(result.graphs == 50);
  CHECK(result.pairs > 1000);
  for (const auto& m : result.mismatches) {
    INFO("graph " << m.graph << ": " << m.source << " -> " << m.destination << " bfs " << m.expected << " installed "
                  << m.installed);
    CHECK(false);
  }
}

TEST_CASE("static chain delivers all but the discovery latency") {
  harness::ChainConfig cfg;
  cfg.medium = harness::reference_medium();
  const auto r = harness::static_chain(cfg);
  CHECK(r.sent == 100);
  CHECK(r.delivered >= 98);
  CHECK(r.route_hops == 3);
}
