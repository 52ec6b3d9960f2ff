#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "fanet/aodv/agent.hpp"
#include "fanet/engine/rng.hpp"
#include "fanet/engine/simulator.hpp"
#include "fanet/harness/simulation.hpp"
#include "fanet/medium/medium.hpp"
#include "fanet/mobility/gauss_markov.hpp"

using namespace fanet;

namespace {

void BM_EventQueue(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  engine::RngStream rng(1, "bench");
  std::vector<double> times(n);
  for (auto& t : times) t = rng.uniform(0.0, 100.0);
  for (auto _ : state) {
    engine::Simulator sim;
    std::uint64_t fired = 0;
    for (double t : times) sim.schedule(t, [&fired] { ++fired; });
    sim.run_until(100.0);
    benchmark::DoNotOptimize(fired);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_EventQueue)->Arg(1 << 10)->Arg(1 << 16);

void BM_GmmStep(benchmark::State& state) {
  mobility::MobilityConfig cfg;
  cfg.bounds.hi = {12000.0, 12000.0, 300.0};
  engine::RngStream rng(1, "mobility");
  auto nodes = mobility::place_nodes(50, cfg, rng);
  for (auto _ : state) {
    for (auto& s : nodes) s = mobility::gmm_step(s, cfg, rng);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * nodes.size()));
}
BENCHMARK(BM_GmmStep);

// Static grid of agents with spacing below the radio range.
struct Grid {
  engine::Simulator sim;
  std::vector<Vec3> pos;
  std::unique_ptr<medium::Medium> medium;
  aodv::AgentContext ctx;
  std::vector<aodv::Agent> agents;

  explicit Grid(int side) {
    for (int i = 0; i < side; ++i) {
      for (int j = 0; j < side; ++j) pos.push_back({200.0 * i, 200.0 * j, 0.0});
    }
    medium = std::make_unique<medium::Medium>(
        sim, pos.size(), [this](NodeId id, engine::SimTime) { return pos[id]; }, medium::MediumConfig{},
        engine::RngStream(1, "backoff"));
    ctx.sim = &sim;
    ctx.medium = medium.get();
    ctx.node_count = pos.size();
    agents.reserve(pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i) agents.emplace_back(static_cast<NodeId>(i), &ctx);
    medium->on_receive([this](NodeId r, const Frame& f) { agents[r].receive(f); });
    medium->on_link_break([this](NodeId s, const Frame& f) { agents[s].link_break(f); });
  }
};

void BM_BroadcastFrames(benchmark::State& state) {
  for (auto _ : state) {
    Grid g(7);
    for (NodeId n = 0; n < g.pos.size(); ++n) {
      for (int k = 0; k < 10; ++k) {
        Frame f;
        f.kind = FrameKind::rreq;
        f.size = 72;
        f.link_src = n;
        g.medium->enqueue(n, f);
      }
    }
    g.sim.run_until(10.0);
    benchmark::DoNotOptimize(g.sim.dispatched_total());
  }
}
BENCHMARK(BM_BroadcastFrames)->Unit(benchmark::kMillisecond);

void BM_RreqFlood(benchmark::State& state) {
  const auto side = static_cast<int>(state.range(0));
  for (auto _ : state) {
    Grid g(side);
    const auto last = static_cast<NodeId>(g.pos.size() - 1);
    g.sim.schedule(0.0, [&g, last] { g.agents[0].originate_rreq(last); });
    g.sim.run_until(5.0);
    benchmark::DoNotOptimize(g.sim.dispatched_total());
  }
}
BENCHMARK(BM_RreqFlood)->Arg(5)->Arg(7)->Unit(benchmark::kMillisecond);

void BM_Scenario(benchmark::State& state) {
  harness::ScenarioConfig cfg;
  cfg.nodes = static_cast<std::size_t>(state.range(0));
  cfg.sim_time = 120.0;
  cfg.attack.kind = state.range(1) != 0 ? adversary::AttackKind::flooding : adversary::AttackKind::none;
  cfg.attack.ratio = state.range(1) != 0 ? 0.25 : 0.0;
  for (auto _ : state) {
    const auto r = harness::run_scenario(cfg);
    benchmark::DoNotOptimize(r.report.app_packets_received);
  }
}
BENCHMARK(BM_Scenario)->Args({25, 0})->Args({50, 0})->Args({50, 1})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
