#include "fanet/harness/simulation.hpp"

#include <charconv>
#include <ostream>

namespace fanet::harness {

namespace {

std::string num(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::size_t uav_count(const ScenarioConfig& c) { return c.nodes - 1; }

}  // namespace

std::vector<workload::Flow> flows_for(const ScenarioConfig& resolved) {
  engine::RngStream rng(resolved.seed, "flows");
  return workload::setup_flows(uav_count(resolved), static_cast<NodeId>(uav_count(resolved)), rng, resolved.traffic);
}

std::vector<NodeId> attacker_pool(const ScenarioConfig& resolved) {
  const auto flows = flows_for(resolved);
  std::vector<bool> endpoint(uav_count(resolved), false);
  for (const auto& f : flows) {
    endpoint[f.source] = true;
    endpoint[f.destination] = true;
  }
  std::vector<NodeId> pool;
  for (std::size_t i = 0; i < endpoint.size(); ++i) {
    if (!endpoint[i]) pool.push_back(static_cast<NodeId>(i));
  }
  return pool;
}

adversary::AttackerSet choose_attackers(const ScenarioConfig& resolved) {
  const auto& a = resolved.attack;
  if (a.kind == adversary::AttackKind::none || adversary::attacker_count(resolved.nodes, a.ratio) == 0) return {};

  const auto pool = attacker_pool(resolved);
  engine::RngStream rng(resolved.seed, "attacker-select");
  if (a.placement == adversary::Placement::random) {
    return adversary::select_attackers(resolved.nodes, pool, a, rng);
  }

  // Observe which nodes relay the flows of an honest network.
  ScenarioConfig honest = resolved;
  honest.attack.kind = adversary::AttackKind::none;
  honest.attack.ratio = 0.0;
  Network probe(honest, {});
  probe.run_until(std::min(a.snapshot_time, resolved.sim_time));
  std::vector<std::pair<NodeId, NodeId>> pairs;
  const NodeId gbs = probe.gbs();
  for (const auto& f : probe.flows()) {
    pairs.emplace_back(f.source, f.destination);
    pairs.emplace_back(f.destination, gbs);
  }
  const std::vector<NodeId> excluded{gbs};
  const auto relays = adversary::snapshot_active_relays(probe.agents(), pairs, excluded, probe.sim().now());
  return adversary::select_attackers(resolved.nodes, pool, a, rng, relays);
}

Network::Network(const ScenarioConfig& cfg, adversary::AttackerSet attackers, Traces traces)
    : cfg_(cfg), traces_(traces) {
  const std::size_t uavs = uav_count(cfg_);
  const std::size_t n = cfg_.nodes;

  engine::RngStream place_rng(cfg_.seed, "mobility-init");
  auto states = mobility::place_nodes(uavs, cfg_.mobility, place_rng);
  fleet_ = std::make_unique<mobility::Fleet>(std::move(states), mobility::place_gbs(cfg_.mobility.bounds),
                                             cfg_.mobility, engine::RngStream(cfg_.seed, "mobility"));
  if (traces_.trajectory) fleet_->set_trajectory_sink(traces_.trajectory);
  fleet_->attach(sim_, cfg_.sim_time);

  mobility::Fleet* fleet = fleet_.get();
  medium_ = std::make_unique<medium::Medium>(
      sim_, n, [fleet](NodeId id, engine::SimTime t) { return fleet->position(id, t); }, cfg_.medium,
      engine::RngStream(cfg_.seed, "backoff"));
  if (traces_.medium_events) medium_->set_event_log(traces_.medium_events);

  recorder_ = std::make_unique<workload::MetricsRecorder>(sim_, cfg_.traffic.flow_count, cfg_.count_gbs_leg);

  ctx_.sim = &sim_;
  ctx_.medium = medium_.get();
  ctx_.config = cfg_.aodv;
  ctx_.config.data_ttl = cfg_.traffic.ttl;
  ctx_.observer = recorder_.get();
  ctx_.node_count = n;
  agents_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) agents_.emplace_back(static_cast<NodeId>(i), &ctx_);

  medium_->on_receive([this](NodeId r, const Frame& f) { agents_[r].receive(f); });
  medium_->on_link_break([this](NodeId s, const Frame& f) { agents_[s].link_break(f); });

  behavior_ = std::make_unique<adversary::AttackBehavior>(cfg_.attack, attackers, n, cfg_.aodv.active_route_timeout,
                                                          engine::RngStream(cfg_.seed, "attack-drop"));
  if (!behavior_->attackers().empty()) {
    for (auto& a : agents_) a.set_hooks(behavior_.get());
  }
  if (cfg_.attack.kind == adversary::AttackKind::flooding && !attackers.empty()) {
    std::vector<aodv::Agent*> flooders;
    for (NodeId id : attackers.ids) flooders.push_back(&agents_.at(id));
    flooder_ = std::make_unique<adversary::Flooder>(cfg_.attack, std::move(flooders), n,
                                                    engine::RngStream(cfg_.seed, "attack-flood"));
    flooder_->attach(sim_, cfg_.sim_time);
  }

  const NodeId gbs = fleet_->gbs_id();
  traffic_ = std::make_unique<workload::TrafficGenerator>(
      flows_for(cfg_), gbs, cfg_.traffic, *recorder_,
      [this](NodeId from, DataPacket p) { agents_[from].send_data(std::move(p)); });
  for (std::size_t i = 0; i < n; ++i) {
    const auto at = static_cast<NodeId>(i);
    agents_[i].on_deliver([this, at](const DataPacket& p) { traffic_->on_delivered(sim_, at, p); });
  }
  traffic_->attach(sim_);
}

void Network::run_until(engine::SimTime t) { sim_.run_until(t); }

workload::MetricsReport Network::finish() {
  if (!finished_) {
    finished_ = true;
    for (const auto& a : agents_) {
      a.for_each_pending([this](const DataPacket& p) { recorder_->note_pending(p); });
    }
    medium_->for_each_in_flight([this](NodeId, const Frame& f) {
      if (const auto* p = std::get_if<DataPacket>(&f.payload)) recorder_->note_pending(*p);
    });
    if (traces_.routing_tables) {
      for (const auto& a : agents_) a.table().dump_csv(*traces_.routing_tables, sim_.now(), a.id());
    }
  }
  return recorder_->report();
}

RunResult run_scenario(const ScenarioConfig& cfg, Traces traces) {
  const ScenarioConfig resolved = cfg.for_run(cfg.seed);
  if (auto issues = validate(resolved); !issues.empty()) throw ConfigError(std::move(issues));

  RunResult r;
  r.seed = resolved.seed;
  r.alpha = resolved.mobility.alpha;
  r.nodes = resolved.nodes;
  r.attack = resolved.attack.kind;
  r.placement = resolved.attack.placement;
  r.ratio = resolved.attack.kind == adversary::AttackKind::none ? 0.0 : resolved.attack.ratio;

  auto attackers = choose_attackers(resolved);
  r.attackers = attackers.ids;
  Network net(resolved, std::move(attackers), traces);
  net.run_until(resolved.sim_time);
  r.report = net.finish();
  r.events = net.sim().dispatched_total();
  r.pdr = r.report.app_packets_sent ? workload::pdr(r.report) : 0.0;
  r.e2e = workload::e2e(r.report);
  r.overhead = workload::overhead(r.report);
  return r;
}

std::string csv_header() {
  return "seed,alpha,nodes,attack,placement,ratio,pdr,e2e_s,overhead,sent,received,control_received,"
         "data_received,drops_attacker,drops_overflow,losses_range";
}

std::string csv_row(const RunResult& r) {
  std::string s;
  s += std::to_string(r.seed) + ',' + num(r.alpha) + ',' + std::to_string(r.nodes) + ',';
  s += std::string(adversary::to_string(r.attack)) + ',' + std::string(adversary::to_string(r.placement)) + ',';
  s += num(r.ratio) + ',' + num(r.pdr) + ',';
  s += (r.e2e ? num(*r.e2e) : "NA") + ',';
  s += (r.overhead ? num(*r.overhead) : "NA") + ',';
  const auto& m = r.report;
  s += std::to_string(m.app_packets_sent) + ',' + std::to_string(m.app_packets_received) + ',' +
       std::to_string(m.control_received) + ',' + std::to_string(m.data_received) + ',' +
       std::to_string(m.drops_attacker) + ',' + std::to_string(m.drops_overflow) + ',' +
       std::to_string(m.losses_range);
  return s;
}

}  // namespace fanet::harness
