#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "fanet/harness/config.hpp"
#include "fanet/harness/results.hpp"
#include "fanet/harness/simulation.hpp"

namespace fanet::harness {

struct RunSpec {
  CellKey cell;
  std::uint64_t seed = 1;
};

/// Cells of the full grid: per density the baseline, then every attack and
/// ratio, with on-route dropping after random dropping when enabled.
std::vector<CellKey> sweep_cells(const ScenarioConfig& cfg);

/// Every cell crossed with cfg.seeds, in cell order then seed order.
std::vector<RunSpec> plan_runs(const ScenarioConfig& cfg, const std::vector<CellKey>& cells);
inline std::vector<RunSpec> plan_sweep(const ScenarioConfig& cfg) { return plan_runs(cfg, sweep_cells(cfg)); }

/// cfg with nodes, attack, placement, ratio and seed taken from the spec.
ScenarioConfig config_for(const ScenarioConfig& cfg, const RunSpec& spec);

struct SweepOptions {
  unsigned jobs = 1;
  /// Called after each run, serialized, in completion order.
  std::function<void(std::size_t done, std::size_t total, const RunResult&)> progress;
};

/// Runs the plan on up to `jobs` threads. Results come back in plan order
/// whatever the number of threads.
std::vector<RunResult> run_sweep(const ScenarioConfig& cfg, const std::vector<RunSpec>& plan,
                                 const SweepOptions& options = {});

void write_runs_csv(std::ostream& out, const std::vector<RunResult>& runs);

}  // namespace fanet::harness
