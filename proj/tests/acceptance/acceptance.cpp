// Acceptance gate: runs every criterion at its stated tolerance and prints one
// PASS/FAIL line per criterion, followed by the runtime budget lines.
#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fanet/harness/charts.hpp"
#include "fanet/harness/config.hpp"
#include "fanet/harness/oracle.hpp"
#include "fanet/harness/reference.hpp"
#include "fanet/harness/results.hpp"
#include "fanet/harness/simulation.hpp"
#include "fanet/harness/sweep.hpp"
#include "fanet/harness/trends.hpp"

namespace fs = std::filesystem;
using namespace fanet;
using namespace fanet::harness;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  int id = 0;
  std::string text;
  bool passed = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct SweepOutcome {
  std::vector<RunResult> runs;
  std::vector<Aggregate> aggregates;
  TrendReport report;
  double wall = 0.0;
};

SweepOutcome sweep(const ScenarioConfig& cfg, unsigned jobs, const fs::path& dir, const std::string& tag) {
  SweepOutcome out;
  const auto plan = plan_sweep(cfg);
  SweepOptions opts;
  opts.jobs = jobs;
  const auto t0 = Clock::now();
  opts.progress = [&](std::size_t done, std::size_t total, const RunResult&) {
    if (done % 50 == 0 || done == total) {
      std::cerr << "  [" << tag << "] " << done << '/' << total << " runs, " << std::fixed << std::setprecision(0)
                << seconds_since(t0) << " s\n";
    }
  };
  out.runs = run_sweep(cfg, plan, opts);
  out.wall = seconds_since(t0);
  out.aggregates = aggregate(out.runs);
  out.report = check_trends(to_table(out.aggregates));

  fs::create_directories(dir);
  std::ofstream runs(dir / "runs.csv");
  write_runs_csv(runs, out.runs);
  std::ofstream aggs(dir / "aggregates.csv");
  write_aggregate_csv(aggs, out.aggregates);
  std::ofstream report(dir / "trends.txt");
  print_report(report, out.report);
  emit_charts(out.aggregates, dir);
  return out;
}

const RuleResult* rule(const TrendReport& r, const std::string& id) {
  for (const auto& x : r.results) {
    if (x.id == id) return &x;
  }
  return nullptr;
}

std::string margin_text(const RuleResult* r) {
  if (r == nullptr) return "rule not evaluated";
  if (r->status == RuleStatus::missing) return "missing cells";
  std::ostringstream s;
  s << "worst margin " << std::showpos << std::setprecision(4) << r->worst_margin();
  return s.str();
}

Verdict from_rule(int id, const std::string& text, const TrendReport& report) {
  const RuleResult* r = rule(report, std::to_string(id));
  return Verdict{id, text, r != nullptr && r->passed(), margin_text(r)};
}

std::string metrics_part(const std::string& row) {
  std::size_t pos = 0;
  for (int i = 0; i < 6; ++i) pos = row.find(',', pos) + 1;
  return row.substr(pos);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string out_dir = "acceptance_out";
  unsigned jobs = 1;
  std::size_t seeds = 10;
  app.add_option("--out", out_dir, "Directory for sweep outputs and charts");
  app.add_option("--jobs", jobs, "Parallel runs per sweep")->check(CLI::PositiveNumber);
  app.add_option("--seeds", seeds, "Seeds per cell (the criteria are stated for 10)")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  const fs::path out(out_dir);
  fs::create_directories(out);
  std::vector<Verdict> verdicts;

  ScenarioConfig base;
  base.seeds.clear();
  for (std::uint64_t s = 1; s <= seeds; ++s) base.seeds.push_back(s);

  // Full sweep at the default queue capacity: criteria 1 to 9 and 12.
  std::cerr << "full sweep, queue 64\n";
  const SweepOutcome main = sweep(base, jobs, out / "queue_64", "queue 64");

  verdicts.push_back(from_rule(1, "baseline PDR >= 0.88 at both densities", main.report));
  verdicts.push_back(from_rule(2, "baseline overhead in [3, 13] low and [1.5, 8] high density", main.report));
  verdicts.push_back(from_rule(3, "flooding 25% high density drops PDR >= 20 points", main.report));
  verdicts.push_back(from_rule(4, "blackhole 25% drops PDR >= 10 points at both densities", main.report));
  verdicts.push_back(from_rule(5, "sinkhole PDR within 3 points and E2E strictly increasing, high density",
                               main.report));
  verdicts.push_back(from_rule(6, "random dropping <= 3 points, on-route >= 3 points and above random", main.report));
  verdicts.push_back(from_rule(7, "blackhole PDR <= min(sinkhole, random dropping) at every ratio", main.report));
  verdicts.push_back(from_rule(8, "flooding 25% overhead >= 1.8x baseline at both densities", main.report));
  verdicts.push_back(from_rule(9, "sinkhole and blackhole overhead nondecreasing in ratio", main.report));

  // 10: determinism across executions and across serial and parallel sweeps.
  {
    std::cerr << "determinism\n";
    bool same = true;
    std::string detail;
    const auto plan = plan_sweep(base);
    std::size_t rechecked = 0;
    for (std::size_t i = 0; i < plan.size(); i += 37) {
      const auto again = run_scenario(config_for(base, plan[i]));
      ++rechecked;
      if (csv_row(again) != csv_row(main.runs[i])) {
        same = false;
        detail = "re-run differs: " + describe(plan[i].cell) + " seed " + std::to_string(plan[i].seed);
      }
    }
    ScenarioConfig small = base;
    small.sim_time = 300.0;
    small.seeds = {1, 2};
    small.ratios = {0.10, 0.25};
    const auto small_plan = plan_sweep(small);
    std::ostringstream serial;
    std::ostringstream parallel;
    write_runs_csv(serial, run_sweep(small, small_plan, SweepOptions{1, {}}));
    write_runs_csv(parallel, run_sweep(small, small_plan, SweepOptions{4, {}}));
    if (serial.str() != parallel.str()) {
      same = false;
      detail += (detail.empty() ? "" : "; ") + std::string("serial and parallel CSV differ");
    }
    if (same) {
      detail = std::to_string(rechecked) + " full runs repeated, " + std::to_string(small_plan.size()) +
               "-run grid serial = parallel";
    }
    verdicts.push_back({10, "bit-identical metrics across executions and serial vs parallel", same, detail});
  }

  // 11: installed hop counts against BFS.
  {
    std::cerr << "shortest-path oracle\n";
    BfsOracleConfig bfs;
    bfs.medium = base.medium;
    bfs.aodv = base.aodv;
    bfs.aodv.process_shorter_duplicates = true;
    const auto r = bfs_oracle(bfs);
    verdicts.push_back({11, "AODV hop counts equal BFS on 50 static 15-node graphs", r.passed(),
                        std::to_string(r.pairs) + " pairs, " + std::to_string(r.mismatches.size()) + " mismatches"});
  }

  // 12: conservation in every run of the full sweep.
  {
    std::size_t bad = 0;
    for (const auto& r : main.runs) bad += r.report.conserved() ? 0 : 1;
    verdicts.push_back({12, "per-flow conservation balances in every sweep run", bad == 0,
                        std::to_string(main.runs.size()) + " runs, " + std::to_string(bad) + " unbalanced"});
  }

  // 13: static chain.
  {
    ChainConfig chain;
    chain.medium = base.medium;
    chain.aodv = base.aodv;
    const auto c = static_chain(chain);
    verdicts.push_back({13, "4-node static chain delivers >= 98 of 100", c.delivered >= 98,
                        std::to_string(c.delivered) + " of " + std::to_string(c.sent) + " over " +
                            std::to_string(c.route_hops) + " hops"});
  }

  // 14: ratio 0 of every attack is the baseline.
  {
    std::cerr << "attack no-op\n";
    bool same = true;
    std::size_t compared = 0;
    std::map<std::pair<std::size_t, std::uint64_t>, const RunResult*> baselines;
    for (const auto& r : main.runs) {
      if (r.attack == adversary::AttackKind::none) baselines[{r.nodes, r.seed}] = &r;
    }
    for (std::size_t nodes : base.densities) {
      for (auto kind : {adversary::AttackKind::sinkhole, adversary::AttackKind::dropping,
                        adversary::AttackKind::blackhole, adversary::AttackKind::flooding}) {
        for (std::uint64_t seed : {std::uint64_t{1}, std::uint64_t{2}}) {
          ScenarioConfig c = base;
          c.nodes = nodes;
          c.seed = seed;
          c.attack.kind = kind;
          c.attack.ratio = 0.0;
          const auto r = run_scenario(c);
          const RunResult* b = baselines.at({nodes, seed});
          ++compared;
          if (metrics_part(csv_row(r)) != metrics_part(csv_row(*b)) || r.events != b->events) same = false;
        }
      }
    }
    verdicts.push_back({14, "every attack at ratio 0 is bit-identical to the baseline", same,
                        std::to_string(compared) + " runs compared"});
  }

  // 15: the rules against the published values themselves.
  {
    const auto r = check_trends(reference_table(), trend_rules());
    std::ofstream f(out / "reference_trends.txt");
    print_report(f, r);
    std::size_t passed = 0;
    for (const auto& x : r.results) passed += x.passed() ? 1 : 0;
    verdicts.push_back({15, "rules 3 to 9 pass on the embedded reference table", r.all_passed(),
                        std::to_string(passed) + " of " + std::to_string(r.results.size()) + " rules"});
  }

  // 16: trend rules at the other queue capacities.
  {
    bool all = true;
    std::string detail;
    for (std::size_t cap : {std::size_t{32}, std::size_t{64}, std::size_t{128}}) {
      TrendReport report;
      if (cap == 64) {
        report = main.report;
      } else {
        std::cerr << "full sweep, queue " << cap << '\n';
        ScenarioConfig c = base;
        c.medium.queue_capacity = cap;
        const auto s = sweep(c, jobs, out / ("queue_" + std::to_string(cap)), "queue " + std::to_string(cap));
        report = s.report;
      }
      std::vector<std::string> failed;
      for (const auto& r : report.results) {
        if (r.id != "1" && r.id != "2" && !r.passed()) failed.push_back(r.id);
      }
      if (!failed.empty()) all = false;
      detail += "queue " + std::to_string(cap) + ": ";
      if (failed.empty()) {
        detail += "all hold";
      } else {
        detail += "fail";
        for (const auto& id : failed) detail += ' ' + id;
      }
      if (cap != 128) detail += "; ";
    }
    verdicts.push_back({16, "rules 3 to 9 hold for queue capacity 32, 64 and 128", all, detail});
  }

  // Runtime budget.
  const double per_run = main.wall / static_cast<double>(std::max<std::size_t>(main.runs.size(), 1));
  const double sweep_210 = per_run * 210.0 * static_cast<double>(seeds) / 10.0;
  double slowest = 0.0;
  {
    ScenarioConfig c = base;
    c.nodes = 50;
    c.attack.kind = adversary::AttackKind::flooding;
    c.attack.ratio = 0.25;
    const auto t0 = Clock::now();
    run_scenario(c);
    slowest = seconds_since(t0);
  }

  std::sort(verdicts.begin(), verdicts.end(), [](const Verdict& a, const Verdict& b) { return a.id < b.id; });
  std::cout << "\nacceptance (" << seeds << " seeds per cell, outputs in " << out.string() << ")\n";
  bool all = true;
  for (const auto& v : verdicts) {
    all = all && v.passed;
    std::cout << (v.passed ? "PASS" : "FAIL") << "  criterion " << std::setw(2) << v.id << ": " << v.text << "  ("
              << v.detail << ")\n";
  }
  std::cout << std::fixed << std::setprecision(1);
  std::cout << (sweep_210 < 1800.0 ? "PASS" : "FAIL") << "  runtime: 210-run sweep " << sweep_210
            << " s at the measured " << std::setprecision(2) << per_run << " s per run (limit 1800 s)\n";
  std::cout << (slowest < 10.0 ? "PASS" : "FAIL") << "  runtime: heaviest single run (50 nodes, flooding 25%) "
            << slowest << " s (limit 10 s)\n";
  all = all && sweep_210 < 1800.0 && slowest < 10.0;

  std::cout << "\ntrend report, queue 64:\n";
  print_report(std::cout, main.report);
  return all ? 0 : 1;
}
