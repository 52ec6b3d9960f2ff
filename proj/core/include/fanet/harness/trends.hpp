#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "fanet/harness/results.hpp"

namespace fanet::harness {

/// One inequality inside a rule. margin > 0 means headroom, < 0 a shortfall.
struct Check {
  std::string what;
  double measured = 0.0;
  double bound = 0.0;
  bool at_least = true;  // measured >= bound, else measured <= bound
  bool strict = false;

  [[nodiscard]] bool passed() const;
  [[nodiscard]] double margin() const { return at_least ? measured - bound : bound - measured; }
};

enum class RuleStatus { pass, fail, missing };

struct RuleResult {
  std::string id;
  std::string name;
  RuleStatus status = RuleStatus::pass;
  std::vector<Check> checks;
  std::vector<CellKey> missing;

  [[nodiscard]] bool passed() const { return status == RuleStatus::pass; }
  /// Smallest margin over the checks.
  [[nodiscard]] double worst_margin() const;
};

/// Densities and ratios a rule set is evaluated over.
struct RuleContext {
  std::size_t low_nodes = 25;
  std::size_t high_nodes = 50;
  std::vector<int> ratios_pct{5, 10, 15, 20, 25};
  /// Relative dip tolerated by the nondecreasing-overhead rule.
  double overhead_dip_tolerance = 0.05;
};

/// Reads cells from a table and records the ones that are absent.
class CellReader {
 public:
  explicit CellReader(const ResultTable& table) : table_(table) {}
  double pdr(const CellKey& key);
  double e2e(const CellKey& key);
  double overhead(const CellKey& key);
  [[nodiscard]] const std::vector<CellKey>& missing() const { return missing_; }

 private:
  const CellMetrics* get(const CellKey& key, bool need_e2e, bool need_overhead);
  const ResultTable& table_;
  std::vector<CellKey> missing_;
};

struct TrendRule {
  std::string id;
  std::string name;
  /// Reference cells the rule is drawn from.
  std::string provenance;
  std::function<std::vector<Check>(CellReader&, const RuleContext&)> evaluate;
};

/// Absolute bands and trend rules, in acceptance order.
std::vector<TrendRule> shipped_rules();
/// The subset that compares attacks against each other (ids 3 to 9).
std::vector<TrendRule> trend_rules();

struct TrendReport {
  std::vector<RuleResult> results;
  [[nodiscard]] bool all_passed() const;
  [[nodiscard]] std::vector<CellKey> missing() const;
};

RuleResult evaluate_rule(const TrendRule& rule, const ResultTable& table, const RuleContext& ctx = {});
TrendReport check_trends(const ResultTable& table, const std::vector<TrendRule>& rules = shipped_rules(),
                         const RuleContext& ctx = {});

/// One line per rule, then one indented line per check.
void print_report(std::ostream& out, const TrendReport& report);

}  // namespace fanet::harness
