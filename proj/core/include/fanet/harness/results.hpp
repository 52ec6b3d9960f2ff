#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fanet/adversary/attacks.hpp"

namespace fanet::harness {

struct RunResult;

/// One cell of a result grid. Ratios are whole percents so keys compare exactly.
struct CellKey {
  std::size_t nodes = 0;
  adversary::AttackKind attack = adversary::AttackKind::none;
  adversary::Placement placement = adversary::Placement::random;
  int ratio_pct = 0;

  auto operator<=>(const CellKey&) const = default;
};

int ratio_percent(double ratio);
CellKey baseline_key(std::size_t nodes);
std::string describe(const CellKey& key);

struct CellMetrics {
  double pdr = 0.0;  // fraction
  std::optional<double> e2e;
  std::optional<double> overhead;
};

/// Cell values of either a simulated sweep or the published reference.
class ResultTable {
 public:
  void set(const CellKey& key, const CellMetrics& metrics) { cells_[key] = metrics; }

  /// Exact cell. A missing ratio-0 attack cell falls back to the baseline
  /// cell of the same density.
  [[nodiscard]] const CellMetrics* find(const CellKey& key) const;
  [[nodiscard]] bool empty() const { return cells_.empty(); }
  [[nodiscard]] std::size_t size() const { return cells_.size(); }
  [[nodiscard]] const std::map<CellKey, CellMetrics>& cells() const { return cells_; }

 private:
  std::map<CellKey, CellMetrics> cells_;
};

struct Stat {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation, 0 for a single value
  std::size_t n = 0;
};

Stat summarize(const std::vector<double>& values);

/// Mean and spread of one cell over its seeds.
struct Aggregate {
  CellKey key;
  std::size_t runs = 0;
  Stat pdr;
  Stat e2e;       // over runs that delivered at least one packet
  Stat overhead;  // over runs with at least one data reception
  bool all_conserved = true;
};

/// Groups runs by cell, in key order.
std::vector<Aggregate> aggregate(const std::vector<RunResult>& runs);
ResultTable to_table(const std::vector<Aggregate>& aggregates);

std::string aggregate_csv_header();
std::string aggregate_csv_row(const Aggregate& a);
void write_aggregate_csv(std::ostream& out, const std::vector<Aggregate>& aggregates);

/// Reads what write_aggregate_csv wrote. Throws std::runtime_error with the line number.
std::vector<Aggregate> read_aggregate_csv(std::istream& in);
std::vector<Aggregate> load_aggregate_csv(const std::filesystem::path& path);

}  // namespace fanet::harness
