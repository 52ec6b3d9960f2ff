#pragma once

#include <map>
#include <memory>
#include <vector>

#include "fanet/aodv/agent.hpp"
#include "fanet/engine/rng.hpp"
#include "fanet/engine/simulator.hpp"
#include "fanet/medium/medium.hpp"

namespace fanet::testing {

struct Recorder : aodv::Observer {
  std::map<FrameKind, std::uint64_t> received;
  std::vector<std::pair<NodeId, DataPacket>> delivered;
  std::vector<std::pair<DataPacket, aodv::DropReason>> dropped;
  std::vector<std::pair<NodeId, Rreq>> rreqs;
  std::vector<std::pair<NodeId, Frame>> frames;

  void data_delivered(NodeId at, const DataPacket& p) override { delivered.emplace_back(at, p); }
  void data_dropped(NodeId, const DataPacket& p, aodv::DropReason r) override { dropped.emplace_back(p, r); }
  void frame_received(NodeId at, const Frame& f) override {
    ++received[f.kind];
    frames.emplace_back(at, f);
  }
  void rreq_originated(NodeId at, const Rreq& r) override { rreqs.emplace_back(at, r); }
};

/// Agents on fixed (but test-editable) positions, no traffic generator.
struct StaticWorld {
  engine::Simulator sim;
  std::vector<Vec3> pos;
  std::unique_ptr<medium::Medium> medium;
  Recorder rec;
  aodv::AgentContext ctx;
  std::vector<aodv::Agent> agents;

  explicit StaticWorld(std::vector<Vec3> p, medium::MediumConfig mc = {}, aodv::AodvConfig ac = {},
                       std::uint64_t seed = 1)
      : pos(std::move(p)) {
    medium = std::make_unique<medium::Medium>(
        sim, pos.size(), [this](NodeId id, engine::SimTime) { return pos[id]; }, mc,
        engine::RngStream(seed, "backoff"));
    ctx.sim = &sim;
    ctx.medium = medium.get();
    ctx.config = ac;
    ctx.observer = &rec;
    ctx.node_count = pos.size();
    agents.reserve(pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i) agents.emplace_back(static_cast<NodeId>(i), &ctx);
    medium->on_receive([this](NodeId r, const Frame& f) { agents[r].receive(f); });
    medium->on_link_break([this](NodeId s, const Frame& f) { agents[s].link_break(f); });
  }

  void at(engine::SimTime t, std::function<void()> fn) { sim.schedule(t, std::move(fn)); }
  void run(engine::SimTime t) { sim.run_until(t); }

  DataPacket packet(NodeId from, NodeId to, std::uint64_t id = 0) const {
    DataPacket p;
    p.id = id;
    p.source = from;
    p.destination = to;
    p.created = sim.now();
    return p;
  }
};

inline std::vector<Vec3> line(std::size_t n, double spacing) {
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({static_cast<double>(i) * spacing, 0.0, 0.0});
  return out;
}

}  // namespace fanet::testing
