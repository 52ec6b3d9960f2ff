#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
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
using namespace fanet::harness;

namespace {

constexpr int kPass = 0;
constexpr int kTrendFailure = 1;
constexpr int kConfigError = 2;

struct Options {
  std::string config;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> nodes;
  std::optional<std::string> attack;
  std::optional<std::string> placement;
  std::optional<double> ratio;
  std::string out;
  unsigned jobs = 1;
};

void add_scenario_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "Scenario file (key = value lines)");
  cmd->add_option("--set", o.overrides, "Override one key, KEY=VALUE (repeatable)");
  cmd->add_option("--seed", o.seed, "Seed of a single run, or the only seed of a sweep");
  cmd->add_option("--nodes", o.nodes, "Node count, ground station included");
  cmd->add_option("--attack", o.attack, "none, sinkhole, blackhole, dropping or flooding");
  cmd->add_option("--placement", o.placement, "Attacker placement: random or on_active_route");
  cmd->add_option("--ratio", o.ratio, "Attacker ratio in [0, 1]");
  cmd->add_option("--out", o.out, "Output directory");
}

ScenarioConfig build_config(const Options& o) {
  ScenarioConfig cfg = o.config.empty() ? ScenarioConfig{} : load_config(o.config);
  std::vector<ConfigIssue> issues;
  auto apply = [&](std::string_view key, const std::string& value) {
    try {
      set_value(cfg, key, value);
    } catch (const std::invalid_argument& e) {
      issues.push_back({0, std::string(key), e.what()});
    }
  };
  for (const std::string& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      issues.push_back({0, kv, "expected KEY=VALUE"});
      continue;
    }
    apply(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.seed) apply("seed", std::to_string(*o.seed));
  if (o.nodes) apply("nodes", std::to_string(*o.nodes));
  if (o.attack) apply("attack", *o.attack);
  if (o.placement) apply("placement", *o.placement);
  if (o.ratio) apply("attack_ratio", std::to_string(*o.ratio));
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (!issues.empty()) throw ConfigError(std::move(issues));
  if (auto more = validate(cfg); !more.empty()) throw ConfigError(std::move(more));
  return cfg;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

int cmd_run(const Options& o, bool traces) {
  const ScenarioConfig cfg = build_config(o);
  Traces t;
  std::ofstream traj;
  std::ofstream events;
  std::ofstream tables;
  if (traces) {
    fs::create_directories(cfg.output_dir);
    traj = open_out(cfg.output_dir / "trajectory.csv");
    events = open_out(cfg.output_dir / "medium_events.csv");
    tables = open_out(cfg.output_dir / "routing_tables.csv");
    t = Traces{&traj, &events, &tables};
  }
  const auto start = std::chrono::steady_clock::now();
  const RunResult r = run_scenario(cfg, t);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::cout << csv_header() << '\n' << csv_row(r) << '\n';
  if (!o.out.empty()) {
    fs::create_directories(cfg.output_dir);
    auto out = open_out(cfg.output_dir / "runs.csv");
    write_runs_csv(out, {r});
  }
  std::cerr << "events " << r.events << ", attackers " << r.attackers.size() << ", conserved "
            << (r.report.conserved() ? "yes" : "NO") << ", " << wall << " s\n";
  return r.report.conserved() ? kPass : kTrendFailure;
}

int cmd_sweep(const Options& o) {
  ScenarioConfig cfg = build_config(o);
  // Narrowing flags restrict the grid instead of setting a single run.
  if (o.seed) cfg.seeds = {*o.seed};
  if (o.nodes) cfg.densities = {*o.nodes};
  if (o.attack) cfg.attacks = {cfg.attack.kind};
  if (o.ratio) cfg.ratios = {*o.ratio};
  if (o.placement && cfg.attack.placement == fanet::adversary::Placement::on_active_route) {
    cfg.sweep_on_route_dropping = true;
  }

  const auto plan = plan_sweep(cfg);
  SweepOptions opts;
  opts.jobs = o.jobs;
  const auto start = std::chrono::steady_clock::now();
  opts.progress = [&](std::size_t done, std::size_t total, const RunResult& r) {
    const double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << '[' << done << '/' << total << "] " << r.nodes << ' ' << fanet::adversary::to_string(r.attack) << ' '
              << fanet::adversary::to_string(r.placement) << ' ' << r.ratio << " seed " << r.seed << " pdr " << r.pdr
              << "  (" << el << " s)\n";
  };
  const auto runs = run_sweep(cfg, plan, opts);
  const auto aggregates = aggregate(runs);

  fs::create_directories(cfg.output_dir);
  {
    auto out = open_out(cfg.output_dir / "runs.csv");
    write_runs_csv(out, runs);
  }
  {
    auto out = open_out(cfg.output_dir / "aggregates.csv");
    write_aggregate_csv(out, aggregates);
  }
  {
    auto out = open_out(cfg.output_dir / "scenario.cfg");
    write_config(out, cfg);
  }
  for (const auto& w : emit_charts(aggregates, cfg.output_dir).warnings) std::cerr << "warning: " << w << '\n';

  const bool conserved =
      std::all_of(aggregates.begin(), aggregates.end(), [](const Aggregate& a) { return a.all_conserved; });
  std::cerr << runs.size() << " runs written to " << cfg.output_dir.string() << (conserved ? "" : ", CONSERVATION FAILED")
            << '\n';
  return conserved ? kPass : kTrendFailure;
}

int cmd_check(const std::string& aggregates_path, bool trends_only) {
  ResultTable table;
  if (aggregates_path.empty()) {
    std::cout << "checking the embedded reference table\n";
    table = reference_table();
  } else {
    table = to_table(load_aggregate_csv(aggregates_path));
  }
  const auto report = check_trends(table, trends_only ? trend_rules() : shipped_rules());
  print_report(std::cout, report);
  return report.all_passed() ? kPass : kTrendFailure;
}

int cmd_chart(const std::string& aggregates_path, const std::string& out) {
  const auto result = emit_charts(load_aggregate_csv(aggregates_path), out.empty() ? fs::path("out") : fs::path(out));
  for (const auto& f : result.files) std::cout << f.string() << '\n';
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  return kPass;
}

int cmd_oracle(const Options& o) {
  const ScenarioConfig cfg = build_config(o);
  BfsOracleConfig bfs;
  bfs.medium = cfg.medium;
  bfs.aodv = cfg.aodv;
  bfs.aodv.process_shorter_duplicates = true;
  bfs.seed = cfg.seed;
  const auto b = bfs_oracle(bfs);
  std::cout << (b.passed() ? "PASS" : "FAIL") << "  shortest paths: " << b.pairs << " pairs over " << b.graphs
            << " graphs, " << b.mismatches.size() << " mismatches\n";
  for (const auto& m : b.mismatches) {
    std::cout << "    graph " << m.graph << ' ' << m.source << " -> " << m.destination << ": bfs " << m.expected
              << ", installed " << m.installed << '\n';
  }

  ChainConfig chain;
  chain.medium = cfg.medium;
  chain.aodv = cfg.aodv;
  chain.seed = cfg.seed;
  const auto c = static_chain(chain);
  const bool chain_ok = c.delivered >= 98;
  std::cout << (chain_ok ? "PASS" : "FAIL") << "  static chain: " << c.delivered << " of " << c.sent
            << " delivered over " << c.route_hops << " hops\n";
  return b.passed() && chain_ok ? kPass : kTrendFailure;
}

int cmd_config(const Options& o) {
  write_config(std::cout, build_config(o));
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FANET routing attack simulator"};
  app.require_subcommand(1);
  Options o;

  bool traces = false;
  auto* run = app.add_subcommand("run", "Run a single scenario and print its metrics row");
  add_scenario_options(run, o);
  run->add_flag("--traces", traces, "Write trajectory, medium event and routing table traces to --out");

  auto* sweep = app.add_subcommand("sweep", "Run the density x attack x ratio x seed grid");
  add_scenario_options(sweep, o);
  sweep->add_option("--jobs", o.jobs, "Parallel runs")->check(CLI::PositiveNumber);

  std::string aggregates;
  bool trends_only = false;
  auto* check = app.add_subcommand("check", "Evaluate the trend rules on aggregates, or on the reference table");
  check->add_option("aggregates", aggregates, "aggregates.csv from a sweep (default: embedded reference)");
  check->add_flag("--trends-only", trends_only, "Skip the absolute baseline bands");

  std::string chart_in;
  auto* chart = app.add_subcommand("chart", "Draw PDR, delay and overhead charts from aggregates");
  chart->add_option("aggregates", chart_in, "aggregates.csv from a sweep")->required();
  chart->add_option("--out", o.out, "Output directory");

  auto* oracle = app.add_subcommand("oracle", "Small static topologies checked against exact answers");
  add_scenario_options(oracle, o);

  auto* config = app.add_subcommand("config", "Print the effective scenario configuration");
  add_scenario_options(config, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }

  try {
    if (*run) return cmd_run(o, traces);
    if (*sweep) return cmd_sweep(o);
    if (*check) return cmd_check(aggregates, trends_only);
    if (*chart) return cmd_chart(chart_in, o.out);
    if (*oracle) return cmd_oracle(o);
    if (*config) return cmd_config(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error:\n";
    for (const auto& i : e.issues()) {
      std::cerr << "  " << (i.line ? "line " + std::to_string(i.line) + ": " : "") << i.key << ": " << i.message << '\n';
    }
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kPass;
}
