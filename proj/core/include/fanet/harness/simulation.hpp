#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fanet/adversary/attacks.hpp"
#include "fanet/aodv/agent.hpp"
#include "fanet/engine/simulator.hpp"
#include "fanet/harness/config.hpp"
#include "fanet/medium/medium.hpp"
#include "fanet/mobility/gauss_markov.hpp"
#include "fanet/workload/traffic.hpp"

namespace fanet::harness {

/// Optional per-run trace sinks. Null members are skipped.
struct Traces {
  std::ostream* trajectory = nullptr;
  std::ostream* medium_events = nullptr;
  std::ostream* routing_tables = nullptr;  // dumped once at run end
};

/// One fully wired run: mobility, medium, one AODV agent per node, traffic
/// and the attacker overlay. Construct with a config already resolved by
/// ScenarioConfig::for_run.
class Network {
 public:
  Network(const ScenarioConfig& cfg, adversary::AttackerSet attackers, Traces traces = {});
  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  void run_until(engine::SimTime t);

  /// Reconciles packets still queued or buffered, then returns the report.
  /// Call once, after the last run_until.
  workload::MetricsReport finish();

  [[nodiscard]] engine::Simulator& sim() { return sim_; }
  [[nodiscard]] const std::vector<aodv::Agent>& agents() const { return agents_; }
  [[nodiscard]] const std::vector<workload::Flow>& flows() const { return traffic_->flows(); }
  [[nodiscard]] const mobility::Fleet& fleet() const { return *fleet_; }
  [[nodiscard]] const medium::Medium& medium() const { return *medium_; }
  [[nodiscard]] const adversary::AttackBehavior& behavior() const { return *behavior_; }
  [[nodiscard]] NodeId gbs() const { return fleet_->gbs_id(); }

 private:
  ScenarioConfig cfg_;
  Traces traces_;
  engine::Simulator sim_;
  std::unique_ptr<mobility::Fleet> fleet_;
  std::unique_ptr<medium::Medium> medium_;
  std::unique_ptr<workload::MetricsRecorder> recorder_;
  aodv::AgentContext ctx_;
  std::vector<aodv::Agent> agents_;
  std::unique_ptr<adversary::AttackBehavior> behavior_;
  std::unique_ptr<adversary::Flooder> flooder_;
  std::unique_ptr<workload::TrafficGenerator> traffic_;
  bool finished_ = false;
};

struct RunResult {
  std::uint64_t seed = 0;
  double alpha = 0.0;
  std::size_t nodes = 0;
  adversary::AttackKind attack = adversary::AttackKind::none;
  adversary::Placement placement = adversary::Placement::random;
  double ratio = 0.0;
  std::vector<NodeId> attackers;
  workload::MetricsReport report;
  double pdr = 0.0;
  std::optional<double> e2e;
  std::optional<double> overhead;
  std::uint64_t events = 0;
};

/// Flow endpoints and the eligible attacker pool for a resolved config.
std::vector<workload::Flow> flows_for(const ScenarioConfig& resolved);
std::vector<NodeId> attacker_pool(const ScenarioConfig& resolved);

/// Selects the attackers of a resolved config, running the no-attack
/// network up to snapshot_time first when placement is on_active_route.
adversary::AttackerSet choose_attackers(const ScenarioConfig& resolved);

/// One deterministic run of cfg.seed (alpha, stop time and home resolved here).
RunResult run_scenario(const ScenarioConfig& cfg, Traces traces = {});

std::string csv_header();
std::string csv_row(const RunResult& r);

}  // namespace fanet::harness
