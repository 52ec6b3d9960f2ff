#include "fanet/harness/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

namespace fanet::harness {

std::vector<CellKey> sweep_cells(const ScenarioConfig& cfg) {
  std::vector<CellKey> cells;
  for (std::size_t nodes : cfg.densities) {
    cells.push_back(baseline_key(nodes));
    for (adversary::AttackKind kind : cfg.attacks) {
      if (kind == adversary::AttackKind::none) continue;
      std::vector<adversary::Placement> placements{adversary::Placement::random};
      if (kind == adversary::AttackKind::dropping && cfg.sweep_on_route_dropping) {
        placements.push_back(adversary::Placement::on_active_route);
      }
      for (adversary::Placement p : placements) {
        for (double r : cfg.ratios) cells.push_back(CellKey{nodes, kind, p, ratio_percent(r)});
      }
    }
  }
  return cells;
}

std::vector<RunSpec> plan_runs(const ScenarioConfig& cfg, const std::vector<CellKey>& cells) {
  std::vector<RunSpec> plan;
  plan.reserve(cells.size() * cfg.seeds.size());
  for (const CellKey& c : cells) {
    for (std::uint64_t seed : cfg.seeds) plan.push_back(RunSpec{c, seed});
  }
  return plan;
}

ScenarioConfig config_for(const ScenarioConfig& cfg, const RunSpec& spec) {
  ScenarioConfig c = cfg;
  c.nodes = spec.cell.nodes;
  c.seed = spec.seed;
  c.attack.kind = spec.cell.attack;
  c.attack.placement = spec.cell.placement;
  c.attack.ratio = spec.cell.ratio_pct / 100.0;
  return c;
}

std::vector<RunResult> run_sweep(const ScenarioConfig& cfg, const std::vector<RunSpec>& plan,
                                 const SweepOptions& options) {
  std::vector<RunResult> results(plan.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex mu;
  std::size_t done = 0;
  std::exception_ptr error;

  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= plan.size()) return;
      try {
        results[i] = run_scenario(config_for(cfg, plan[i]));
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
        failed = true;
        return;
      }
      std::lock_guard lock(mu);
      ++done;
      if (options.progress) options.progress(done, plan.size(), results[i]);
    }
  };

  const unsigned jobs = std::max(1U, std::min<unsigned>(options.jobs, static_cast<unsigned>(plan.size())));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(jobs);
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return results;
}

void write_runs_csv(std::ostream& out, const std::vector<RunResult>& runs) {
  out << csv_header() << '\n';
  for (const RunResult& r : runs) out << csv_row(r) << '\n';
}

}  // namespace fanet::harness
