#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fanet/harness/results.hpp"

namespace fanet::harness {

enum class ChartMetric { pdr, e2e, overhead };

struct ChartOutput {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> warnings;
};

/// One SVG line chart of `metric` against attacker ratio, a panel per
/// density and a series per attack. Ratio 0 of every series is the baseline.
void write_chart_svg(std::ostream& out, const std::vector<Aggregate>& aggregates, ChartMetric metric);

/// Writes pdr.svg, e2e.svg and overhead.svg into `dir`. Empty input writes
/// nothing and returns a warning.
ChartOutput emit_charts(const std::vector<Aggregate>& aggregates, const std::filesystem::path& dir);

}  // namespace fanet::harness
