#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "fanet/harness/results.hpp"

namespace fanet::harness {

/// The published averages, as shipped in data/reference_tables.csv and
/// embedded at build time.
const ResultTable& reference_table();
std::string_view reference_csv_text();

/// Parses the reference format: `#` comment lines, a header, then
/// nodes,attack,placement,ratio_pct,pdr_pct,e2e_s,overhead[,source].
ResultTable parse_reference_csv(std::istream& in);
ResultTable load_reference_csv(const std::filesystem::path& path);

}  // namespace fanet::harness
