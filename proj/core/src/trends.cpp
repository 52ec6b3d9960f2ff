#include "fanet/harness/trends.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace fanet::harness {

using adversary::AttackKind;
using adversary::Placement;

bool Check::passed() const {
  if (!std::isfinite(measured)) return false;
  const double m = margin();
  return strict ? m > 0.0 : m >= 0.0;
}

double RuleResult::worst_margin() const {
  double worst = std::numeric_limits<double>::infinity();
  for (const Check& c : checks) worst = std::min(worst, c.margin());
  return worst;
}

const CellMetrics* CellReader::get(const CellKey& key, bool need_e2e, bool need_overhead) {
  const CellMetrics* m = table_.find(key);
  if (m == nullptr || (need_e2e && !m->e2e) || (need_overhead && !m->overhead)) {
    if (std::find(missing_.begin(), missing_.end(), key) == missing_.end()) missing_.push_back(key);
    return nullptr;
  }
  return m;
}

double CellReader::pdr(const CellKey& key) {
  const CellMetrics* m = get(key, false, false);
  return m ? m->pdr : std::numeric_limits<double>::quiet_NaN();
}

double CellReader::e2e(const CellKey& key) {
  const CellMetrics* m = get(key, true, false);
  return m ? *m->e2e : std::numeric_limits<double>::quiet_NaN();
}

double CellReader::overhead(const CellKey& key) {
  const CellMetrics* m = get(key, false, true);
  return m ? *m->overhead : std::numeric_limits<double>::quiet_NaN();
}

namespace {

CellKey cell(std::size_t nodes, AttackKind kind, int pct, Placement placement = Placement::random) {
  return CellKey{nodes, kind, placement, pct};
}

std::string density(std::size_t nodes, const RuleContext& ctx) {
  return nodes == ctx.low_nodes ? "low density" : nodes == ctx.high_nodes ? "high density" : std::to_string(nodes) + " nodes";
}

std::vector<std::size_t> both(const RuleContext& ctx) { return {ctx.low_nodes, ctx.high_nodes}; }

// PDR drop from the baseline, in percentage points.
double drop(CellReader& r, const CellKey& key) { return (r.pdr(baseline_key(key.nodes)) - r.pdr(key)) * 100.0; }

Check at_least(std::string what, double measured, double bound, bool strict = false) {
  return Check{std::move(what), measured, bound, true, strict};
}

Check at_most(std::string what, double measured, double bound) { return Check{std::move(what), measured, bound, false, false}; }

std::vector<int> with_zero(const RuleContext& ctx) {
  std::vector<int> r{0};
  r.insert(r.end(), ctx.ratios_pct.begin(), ctx.ratios_pct.end());
  return r;
}

}  // namespace

std::vector<TrendRule> shipped_rules() {
  std::vector<TrendRule> rules;

  rules.push_back({"1", "baseline PDR at least 0.88", "no-attack rows, both densities",
                   [](CellReader& r, const RuleContext& ctx) {
                     std::vector<Check> c;
                     for (auto n : both(ctx)) {
                       c.push_back(at_least(density(n, ctx) + " baseline PDR", r.pdr(baseline_key(n)), 0.88));
                     }
                     return c;
                   }});

  rules.push_back({"2", "baseline overhead within its density band", "no-attack rows, both densities",
                   [](CellReader& r, const RuleContext& ctx) {
                     const double lo = r.overhead(baseline_key(ctx.low_nodes));
                     const double hi = r.overhead(baseline_key(ctx.high_nodes));
                     return std::vector<Check>{at_least("low density baseline overhead", lo, 3.0),
                                               at_most("low density baseline overhead", lo, 13.0),
                                               at_least("high density baseline overhead", hi, 1.5),
                                               at_most("high density baseline overhead", hi, 8.0)};
                   }});

  rules.push_back({"3", "flooding at 25% cuts high-density PDR by 20 points", "flooding rows, high density, 0% and 25%",
                   [](CellReader& r, const RuleContext& ctx) {
                     return std::vector<Check>{at_least("high density flooding @25% PDR drop (points)",
                                                        drop(r, cell(ctx.high_nodes, AttackKind::flooding, 25)), 20.0)};
                   }});

  rules.push_back({"4", "blackhole at 25% cuts PDR by 10 points", "blackhole rows, both densities, 0% and 25%",
                   [](CellReader& r, const RuleContext& ctx) {
                     std::vector<Check> c;
                     for (auto n : both(ctx)) {
                       c.push_back(at_least(density(n, ctx) + " blackhole @25% PDR drop (points)",
                                            drop(r, cell(n, AttackKind::blackhole, 25)), 10.0));
                     }
                     return c;
                   }});

  rules.push_back({"5", "sinkhole keeps PDR within 3 points while E2E rises", "sinkhole rows, high density, all ratios",
                   [](CellReader& r, const RuleContext& ctx) {
                     std::vector<Check> c;
                     const auto n = ctx.high_nodes;
                     for (int pct : ctx.ratios_pct) {
                       c.push_back(at_most("sinkhole @" + std::to_string(pct) + "% |PDR change| (points)",
                                           std::abs(drop(r, cell(n, AttackKind::sinkhole, pct))), 3.0));
                     }
                     const auto ratios = with_zero(ctx);
                     for (std::size_t i = 1; i < ratios.size(); ++i) {
                       const double prev = r.e2e(cell(n, AttackKind::sinkhole, ratios[i - 1]));
                       const double next = r.e2e(cell(n, AttackKind::sinkhole, ratios[i]));
                       c.push_back(at_least("sinkhole E2E step " + std::to_string(ratios[i - 1]) + "% -> " +
                                                std::to_string(ratios[i]) + "% (s)",
                                            next - prev, 0.0, true));
                     }
                     return c;
                   }});

  rules.push_back({"6", "dropping hurts only when placed on active routes",
                   "dropping rows, random and on-active-route placement, both densities, 25%",
                   [](CellReader& r, const RuleContext& ctx) {
                     std::vector<Check> c;
                     for (auto n : both(ctx)) {
                       const double random = drop(r, cell(n, AttackKind::dropping, 25));
                       const double routed = drop(r, cell(n, AttackKind::dropping, 25, Placement::on_active_route));
                       const auto d = density(n, ctx);
                       c.push_back(at_most(d + " random dropping @25% PDR drop (points)", random, 3.0));
                       c.push_back(at_least(d + " on-route dropping @25% PDR drop (points)", routed, 3.0));
                       c.push_back(at_least(d + " on-route minus random drop (points)", routed - random, 0.0, true));
                     }
                     return c;
                   }});

  rules.push_back({"7", "blackhole PDR at most sinkhole and random dropping PDR",
                   "sinkhole, dropping and blackhole rows, both densities, 5% to 25%",
                   [](CellReader& r, const RuleContext& ctx) {
                     std::vector<Check> c;
                     for (auto n : both(ctx)) {
                       for (int pct : ctx.ratios_pct) {
                         const double black = r.pdr(cell(n, AttackKind::blackhole, pct));
                         const double other = std::min(r.pdr(cell(n, AttackKind::sinkhole, pct)),
                                                       r.pdr(cell(n, AttackKind::dropping, pct)));
                         c.push_back(at_least(density(n, ctx) + " @" + std::to_string(pct) +
                                                  "% min(sinkhole, dropping) - blackhole PDR",
                                              other - black, 0.0));
                       }
                     }
                     return c;
                   }});

  rules.push_back({"8", "flooding at 25% at least 1.8x baseline overhead", "flooding rows, both densities, 0% and 25%",
                   [](CellReader& r, const RuleContext& ctx) {
                     std::vector<Check> c;
                     for (auto n : both(ctx)) {
                       c.push_back(at_least(density(n, ctx) + " flooding @25% overhead / baseline",
                                            r.overhead(cell(n, AttackKind::flooding, 25)) /
                                                r.overhead(baseline_key(n)),
                                            1.8));
                     }
                     return c;
                   }});

  rules.push_back({"9", "sinkhole and blackhole overhead nondecreasing in ratio",
                   "sinkhole and blackhole rows, both densities, all ratios",
                   [](CellReader& r, const RuleContext& ctx) {
                     std::vector<Check> c;
                     const auto ratios = with_zero(ctx);
                     for (AttackKind kind : {AttackKind::sinkhole, AttackKind::blackhole}) {
                       for (auto n : both(ctx)) {
                         for (std::size_t i = 1; i < ratios.size(); ++i) {
                           const double prev = r.overhead(cell(n, kind, ratios[i - 1]));
                           const double next = r.overhead(cell(n, kind, ratios[i]));
                           c.push_back(at_least(density(n, ctx) + " " + std::string(adversary::to_string(kind)) +
                                                    " overhead " + std::to_string(ratios[i - 1]) + "% -> " +
                                                    std::to_string(ratios[i]) + "% ratio",
                                                next / prev, 1.0 - ctx.overhead_dip_tolerance));
                         }
                       }
                     }
                     return c;
                   }});
  return rules;
}

std::vector<TrendRule> trend_rules() {
  auto all = shipped_rules();
  std::vector<TrendRule> out;
  for (auto& r : all) {
    if (r.id != "1" && r.id != "2") out.push_back(std::move(r));
  }
  return out;
}

RuleResult evaluate_rule(const TrendRule& rule, const ResultTable& table, const RuleContext& ctx) {
  RuleResult out;
  out.id = rule.id;
  out.name = rule.name;
  CellReader reader(table);
  out.checks = rule.evaluate(reader, ctx);
  out.missing = reader.missing();
  if (!out.missing.empty()) {
    out.status = RuleStatus::missing;
  } else {
    const bool ok = std::all_of(out.checks.begin(), out.checks.end(), [](const Check& c) { return c.passed(); });
    out.status = ok ? RuleStatus::pass : RuleStatus::fail;
  }
  return out;
}

TrendReport check_trends(const ResultTable& table, const std::vector<TrendRule>& rules, const RuleContext& ctx) {
  TrendReport report;
  for (const TrendRule& rule : rules) report.results.push_back(evaluate_rule(rule, table, ctx));
  return report;
}

bool TrendReport::all_passed() const {
  return std::all_of(results.begin(), results.end(), [](const RuleResult& r) { return r.passed(); });
}

std::vector<CellKey> TrendReport::missing() const {
  std::vector<CellKey> out;
  for (const RuleResult& r : results) {
    for (const CellKey& k : r.missing) {
      if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
    }
  }
  return out;
}

void print_report(std::ostream& out, const TrendReport& report) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::fixed << std::setprecision(4);
  for (const RuleResult& r : report.results) {
    const char* status = r.status == RuleStatus::pass ? "PASS" : r.status == RuleStatus::fail ? "FAIL" : "MISSING";
    out << status << "  rule " << r.id << ": " << r.name;
    if (r.status != RuleStatus::missing) out << "  (worst margin " << std::showpos << r.worst_margin() << std::noshowpos << ')';
    out << '\n';
    for (const CellKey& k : r.missing) out << "    missing cell: " << describe(k) << '\n';
    if (r.status == RuleStatus::missing) continue;
    for (const Check& c : r.checks) {
      out << "    " << (c.passed() ? "ok  " : "FAIL") << ' ' << c.what << " = " << c.measured
          << (c.at_least ? (c.strict ? " > " : " >= ") : " <= ") << c.bound << "  [" << std::showpos << c.margin()
          << std::noshowpos << "]\n";
    }
  }
  out.flags(flags);
  out.precision(precision);
}

}  // namespace fanet::harness
