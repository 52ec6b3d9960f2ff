#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fanet/harness/charts.hpp"
#include "fanet/harness/config.hpp"
#include "fanet/harness/reference.hpp"
#include "fanet/harness/results.hpp"
#include "fanet/harness/simulation.hpp"
#include "fanet/harness/sweep.hpp"
#include "fanet/harness/trends.hpp"

using namespace fanet;
using namespace fanet::harness;
namespace fs = std::filesystem;

namespace {

std::string value_of(const ScenarioConfig& cfg, const std::string& key) {
  for (const auto& [k, v] : serialize(cfg)) {
    if (k == key) return v;
  }
  return "<missing>";
}

ScenarioConfig parse(const std::string& text, ScenarioConfig base = {}) {
  std::istringstream in(text);
  return parse_config(in, base);
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("fanet_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Aggregate agg(std::size_t nodes, adversary::AttackKind kind, int pct, double pdr, double e2e, double ovh) {
  Aggregate a;
  a.key = CellKey{nodes, kind, adversary::Placement::random, pct};
  a.runs = 10;
  a.pdr = {pdr, 0.01, 10};
  a.e2e = {e2e, 0.001, 10};
  a.overhead = {ovh, 0.1, 10};
  return a;
}

}  // namespace

TEST_CASE("defaults describe the reference scenario") {
  const ScenarioConfig cfg;
  CHECK(cfg.nodes == 50);
  CHECK(cfg.sim_time == 1800.0);
  CHECK(cfg.mobility.bounds.hi.x == 12000.0);
  CHECK(cfg.mobility.bounds.hi.y == 12000.0);
  CHECK(cfg.mobility.bounds.hi.z == 300.0);
  CHECK(cfg.mobility.mean_speed == 100.0);
  CHECK(cfg.medium.range == 250.0);
  CHECK(cfg.medium.bitrate == 11e6);
  CHECK(cfg.traffic.payload == 512);
  CHECK(cfg.traffic.rate == 1.0);
  CHECK(cfg.traffic.flow_count == 10);
  CHECK(cfg.traffic.start == 10.0);
  CHECK(cfg.densities == std::vector<std::size_t>{25, 50});
  CHECK(cfg.ratios.size() == 5);
  CHECK(cfg.seeds.size() == 10);
}

TEST_CASE("every documented key is serialized") {
  const auto values = serialize(ScenarioConfig{});
  const auto docs = documented_keys();
  CHECK(values.size() == docs.size());
  for (const auto& d : docs) {
    CAPTURE(d.key);
    CHECK(value_of(ScenarioConfig{}, d.key) != "<missing>");
    CHECK_FALSE(d.description.empty());
  }
}

TEST_CASE("serialize and parse round trip") {
  ScenarioConfig cfg;
  cfg.nodes = 37;
  cfg.medium.queue_capacity = 128;
  cfg.attack.kind = adversary::AttackKind::blackhole;
  cfg.attack.ratio = 0.15;
  cfg.ratios = {0.05, 0.25};
  cfg.mobility.speed_sd = 7.25;
  std::ostringstream out;
  write_config(out, cfg);
  const auto back = parse(out.str(), ScenarioConfig{});
  CHECK(serialize(back) == serialize(cfg));
  CHECK(back.nodes == 37);
  CHECK(back.attack.kind == adversary::AttackKind::blackhole);
  CHECK(back.ratios == std::vector<double>{0.05, 0.25});
}

TEST_CASE("comments and blank lines are ignored") {
  const auto cfg = parse("# scenario\n\nnodes = 25   # low density\n  attack = flooding\n");
  CHECK(cfg.nodes == 25);
  CHECK(cfg.attack.kind == adversary::AttackKind::flooding);
}

TEST_CASE("parse errors carry line numbers and are collected") {
  try {
    parse("nodes = 25\nbogus_key = 1\nrange = far\nattack = wormhole\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    REQUIRE(e.issues().size() == 3);
    CHECK(e.issues()[0].line == 2);
    CHECK(e.issues()[0].key == "bogus_key");
    CHECK(e.issues()[1].line == 3);
    CHECK(e.issues()[1].key == "range");
    CHECK(e.issues()[2].line == 4);
  }
}

TEST_CASE("semantic validation") {
  CHECK_THROWS_AS(parse("sim_time = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse("attack_ratio = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(parse("range = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse("nodes = 10\n"), ConfigError);
  CHECK(validate(ScenarioConfig{}).empty());
}

TEST_CASE("alpha follows the seed index") {
  ScenarioConfig cfg;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    CHECK(cfg.alpha_for_seed(s) == doctest::Approx(0.25 + 0.05 * static_cast<double>(s - 1)));
    CHECK(cfg.for_run(s).mobility.alpha == doctest::Approx(cfg.alpha_for_seed(s)));
  }
  CHECK(cfg.alpha_for_seed(10) == doctest::Approx(0.70));
  cfg.alpha_from_seed = false;
  cfg.mobility.alpha = 0.9;
  CHECK(cfg.for_run(4).mobility.alpha == 0.9);
  CHECK(cfg.for_run(4).traffic.stop == cfg.sim_time);
}

TEST_CASE("sweep grid size") {
  ScenarioConfig cfg;
  cfg.sweep_on_route_dropping = false;
  const auto cells = sweep_cells(cfg);
  CHECK(cells.size() == 2 * (1 + 4 * 5));
  CHECK(plan_sweep(cfg).size() == 420);

  cfg.sweep_on_route_dropping = true;
  CHECK(sweep_cells(cfg).size() == 2 * (1 + 5 * 5));
  CHECK(plan_sweep(cfg).size() == 520);

  const auto plan = plan_sweep(cfg);
  CHECK(plan.front().cell == baseline_key(25));
  CHECK(plan.front().seed == 1);
  CHECK(plan[9].seed == 10);
  const auto c = config_for(cfg, plan[10]);
  CHECK(c.nodes == 25);
  CHECK(c.attack.kind == adversary::AttackKind::sinkhole);
  CHECK(c.attack.ratio == doctest::Approx(0.05));
}

TEST_CASE("ratio keys are whole percents") {
  CHECK(ratio_percent(0.05) == 5);
  CHECK(ratio_percent(0.15) == 15);
  CHECK(ratio_percent(0.29) == 29);
  CHECK(ratio_percent(0.0) == 0);
}

TEST_CASE("statistics of a cell") {
  const auto s = summarize({1.0, 2.0, 3.0, 4.0});
  CHECK(s.mean == doctest::Approx(2.5));
  CHECK(s.sd == doctest::Approx(1.2909944));
  CHECK(s.n == 4);
  CHECK(summarize({5.0}).sd == 0.0);
  CHECK(summarize({}).n == 0);
}

TEST_CASE("reference table loads and passes its own rules") {
  const auto& ref = reference_table();
  CHECK(ref.size() >= 60);
  const auto* base = ref.find(baseline_key(50));
  REQUIRE(base != nullptr);
  CHECK(base->pdr == doctest::Approx(0.94));
  CHECK(*base->e2e == doctest::Approx(0.100));
  CHECK(*base->overhead == doctest::Approx(3.77));

  const auto report = check_trends(ref);
  CHECK(report.results.size() == 9);
  for (const auto& r : report.results) {
    CAPTURE(r.id);
    CHECK(r.passed());
  }
}

TEST_CASE("reference csv parsing") {
  std::istringstream in(
      "# comment\n"
      "nodes,attack,placement,ratio_pct,pdr_pct,e2e_s,overhead,source\n"
      "25,none,random,0,93.70,0.084,7.49,baseline\n"
      "25,dropping,on_active_route,10,80.00,0.070,8.00\n");
  const auto t = parse_reference_csv(in);
  CHECK(t.size() == 2);
  const auto* c = t.find(CellKey{25, adversary::AttackKind::dropping, adversary::Placement::on_active_route, 10});
  REQUIRE(c != nullptr);
  CHECK(c->pdr == doctest::Approx(0.80));

  // Ratio 0 of an attack falls back to the baseline.
  const auto* zero = t.find(CellKey{25, adversary::AttackKind::blackhole, adversary::Placement::random, 0});
  REQUIRE(zero != nullptr);
  CHECK(zero->pdr == doctest::Approx(0.937));

  std::istringstream bad("nodes,attack,placement,ratio_pct,pdr_pct,e2e_s,overhead\n25,teleport,random,5,1,1,1\n");
  CHECK_THROWS(parse_reference_csv(bad));
}

TEST_CASE("trend rules report missing cells instead of passing") {
  ResultTable t;
  t.set(baseline_key(25), CellMetrics{0.95, 0.01, 3.0});
  t.set(baseline_key(50), CellMetrics{0.95, 0.01, 3.0});
  const auto report = check_trends(t, trend_rules());
  CHECK_FALSE(report.all_passed());
  for (const auto& r : report.results) CHECK(r.status == RuleStatus::missing);
  CHECK_FALSE(report.missing().empty());
}

TEST_CASE("a single check compares in the right direction") {
  Check at_least{"x", 1.0, 0.5, true, false};
  CHECK(at_least.passed());
  CHECK(at_least.margin() == doctest::Approx(0.5));
  Check at_most{"y", 1.0, 0.5, false, false};
  CHECK_FALSE(at_most.passed());
  Check strict{"z", 0.5, 0.5, true, true};
  CHECK_FALSE(strict.passed());
}

TEST_CASE("aggregate csv round trip") {
  std::vector<Aggregate> in{agg(25, adversary::AttackKind::none, 0, 0.95, 0.01, 3.0),
                            agg(25, adversary::AttackKind::flooding, 25, 0.7, 0.05, 900.0)};
  in[1].all_conserved = false;
  in[1].e2e.n = 0;
  std::stringstream s;
  write_aggregate_csv(s, in);
  const auto out = read_aggregate_csv(s);
  REQUIRE(out.size() == 2);
  CHECK(out[0].key == in[0].key);
  CHECK(out[1].key == in[1].key);
  CHECK(out[0].pdr.mean == in[0].pdr.mean);
  CHECK(out[1].overhead.mean == in[1].overhead.mean);
  CHECK_FALSE(out[1].all_conserved);
  CHECK(out[1].e2e.n == 0);

  std::istringstream broken(aggregate_csv_header() + "\n25,none,random,zero\n");
  CHECK_THROWS_AS(read_aggregate_csv(broken), std::runtime_error);
}

TEST_CASE("charts") {
  SUBCASE("no aggregates writes nothing") {
    const auto dir = scratch("charts_empty");
    const auto r = emit_charts({}, dir);
    CHECK(r.files.empty());
    REQUIRE(r.warnings.size() == 1);
    CHECK(fs::is_empty(dir));
  }
  SUBCASE("one attack gives one series per panel") {
    std::vector<Aggregate> a{agg(25, adversary::AttackKind::none, 0, 0.95, 0.01, 3.0)};
    for (int p : {5, 10, 15}) a.push_back(agg(25, adversary::AttackKind::blackhole, p, 0.9 - p / 100.0, 0.01, 3.5));
    std::ostringstream svg;
    write_chart_svg(svg, a, ChartMetric::pdr);
    const std::string s = svg.str();
    CHECK(s.find("<svg") == 0);
    std::size_t lines = 0;
    for (auto pos = s.find("<polyline"); pos != std::string::npos; pos = s.find("<polyline", pos + 1)) ++lines;
    CHECK(lines == 1);
    CHECK(s.find("blackhole") != std::string::npos);

    const auto dir = scratch("charts_one");
    const auto r = emit_charts(a, dir);
    CHECK(r.files.size() == 3);
    CHECK(r.warnings.empty());
    CHECK(fs::exists(dir / "overhead.svg"));
  }
  SUBCASE("wide overhead range switches to a log axis") {
    std::vector<Aggregate> a{agg(50, adversary::AttackKind::none, 0, 0.95, 0.01, 3.0),
                             agg(50, adversary::AttackKind::flooding, 25, 0.7, 0.05, 900.0)};
    std::ostringstream svg;
    write_chart_svg(svg, a, ChartMetric::overhead);
    CHECK(svg.str().find("log scale") != std::string::npos);
  }
}

TEST_CASE("runs are reproducible") {
  ScenarioConfig cfg;
  cfg.nodes = 25;
  cfg.sim_time = 150.0;
  cfg.seed = 2;
  cfg.attack.kind = adversary::AttackKind::dropping;
  cfg.attack.ratio = 0.1;
  const auto a = run_scenario(cfg);
  const auto b = run_scenario(cfg);
  CHECK(csv_row(a) == csv_row(b));
  CHECK(a.events == b.events);
  CHECK(a.attackers == b.attackers);

  cfg.seed = 3;
  CHECK(csv_row(run_scenario(cfg)) != csv_row(a));
}

TEST_CASE("parallel sweep matches serial") {
  ScenarioConfig cfg;
  cfg.sim_time = 60.0;
  cfg.seeds = {1, 2};
  cfg.densities = {25};
  cfg.attacks = {adversary::AttackKind::blackhole, adversary::AttackKind::flooding};
  cfg.ratios = {0.1};
  cfg.sweep_on_route_dropping = false;
  const auto plan = plan_sweep(cfg);
  REQUIRE(plan.size() == 6);
  std::ostringstream serial;
  std::ostringstream parallel;
  write_runs_csv(serial, run_sweep(cfg, plan, SweepOptions{1, {}}));
  write_runs_csv(parallel, run_sweep(cfg, plan, SweepOptions{3, {}}));
  CHECK(serial.str() == parallel.str());
}

TEST_CASE("trajectory trace has one row per node and step") {
  ScenarioConfig cfg;
  cfg.nodes = 25;
  cfg.sim_time = 20.0;
  std::ostringstream traj;
  Traces t;
  t.trajectory = &traj;
  run_scenario(cfg, t);
  std::size_t rows = 0;
  std::istringstream in(traj.str());
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows >= 25 * 20);
}
