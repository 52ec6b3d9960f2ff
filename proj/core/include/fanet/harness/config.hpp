#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fanet/adversary/attacks.hpp"
#include "fanet/aodv/agent.hpp"
#include "fanet/medium/medium.hpp"
#include "fanet/mobility/gauss_markov.hpp"
#include "fanet/workload/traffic.hpp"

namespace fanet::harness {

/// Scenario mobility: the swarm rotates about the ground station at 100 m/s
/// on average, with Gauss-Markov jitter around the rotation.
mobility::MobilityConfig reference_mobility();
/// 802.11b-like medium: broadcasts at the 1 Mbit/s basic rate and a fixed
/// per-frame cost for inter-frame space and preamble.
medium::MediumConfig reference_medium();
aodv::AodvConfig reference_aodv();
adversary::AttackConfig reference_attack();

/// Everything one run or one sweep needs. Defaults describe the reference
/// scenario: 50 nodes (ground station included) over 12 km x 12 km x 300 m
/// for 1800 s, 100 m/s UAVs, 250 m radios at 11 Mbit/s and ten 1 packet/s
/// flows of 512-byte packets.
struct ScenarioConfig {
  std::size_t nodes = 50;
  double sim_time = 1800.0;
  std::uint64_t seed = 1;
  /// Seed i of a sweep (0-based) flies with alpha_start + i * alpha_step.
  double alpha_start = 0.25;
  double alpha_step = 0.05;
  /// When false, the alpha of a single run is `mobility.alpha` regardless of seed.
  bool alpha_from_seed = true;

  mobility::MobilityConfig mobility = reference_mobility();
  medium::MediumConfig medium = reference_medium();
  aodv::AodvConfig aodv = reference_aodv();
  workload::TrafficConfig traffic;
  adversary::AttackConfig attack = reference_attack();
  /// Count the destination to GBS leg in PDR and E2E.
  bool count_gbs_leg = true;

  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<std::size_t> densities{25, 50};
  std::vector<adversary::AttackKind> attacks{adversary::AttackKind::sinkhole, adversary::AttackKind::dropping,
                                             adversary::AttackKind::blackhole, adversary::AttackKind::flooding};
  std::vector<double> ratios{0.05, 0.10, 0.15, 0.20, 0.25};
  /// Also sweep dropping with on-active-route placement.
  bool sweep_on_route_dropping = true;

  std::filesystem::path output_dir = "out";

  /// Alpha used for `seed` in a sweep whose seed list is `seeds`.
  [[nodiscard]] double alpha_for_seed(std::uint64_t seed) const;
  /// Copy with seed, alpha and stop time resolved for a single run.
  [[nodiscard]] ScenarioConfig for_run(std::uint64_t run_seed) const;
};

struct ConfigIssue {
  std::size_t line = 0;  // 0 when not tied to a line
  std::string key;
  std::string message;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  [[nodiscard]] const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

/// Reads `key = value` lines; `#` starts a comment. Unknown keys, malformed
/// values and failed validation are all collected and thrown together.
ScenarioConfig parse_config(std::istream& in, ScenarioConfig base = {});
ScenarioConfig load_config(const std::filesystem::path& path);

/// Applies one key. Throws std::invalid_argument with a readable message.
void set_value(ScenarioConfig& cfg, std::string_view key, std::string_view value);

/// Every key with its current value, in documentation order.
std::vector<std::pair<std::string, std::string>> serialize(const ScenarioConfig& cfg);
void write_config(std::ostream& out, const ScenarioConfig& cfg);

struct KeyDoc {
  std::string key;
  std::string description;
};
std::vector<KeyDoc> documented_keys();

/// Semantic checks beyond per-key parsing.
std::vector<ConfigIssue> validate(const ScenarioConfig& cfg);

}  // namespace fanet::harness
