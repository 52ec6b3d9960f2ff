#include "fanet/harness/reference.hpp"

#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "text.hpp"

namespace fanet::harness {

// Generated from data/reference_tables.csv.
extern const char* const kReferenceCsv;

std::string_view reference_csv_text() { return kReferenceCsv; }

ResultTable parse_reference_csv(std::istream& in) {
  ResultTable t;
  std::string line;
  std::size_t line_no = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    try {
      const auto f = detail::split(text);
      if (f.size() < 7) throw std::invalid_argument("expected at least 7 fields");
      CellKey key;
      key.nodes = detail::parse_uint(f[0]);
      const auto kind = adversary::parse_attack_kind(f[1]);
      const auto placement = adversary::parse_placement(f[2]);
      if (!kind) throw std::invalid_argument("unknown attack '" + std::string(f[1]) + "'");
      if (!placement) throw std::invalid_argument("unknown placement '" + std::string(f[2]) + "'");
      key.attack = *kind;
      key.placement = *placement;
      key.ratio_pct = static_cast<int>(detail::parse_uint(f[3]));
      CellMetrics m;
      m.pdr = detail::parse_double(f[4]) / 100.0;
      m.e2e = detail::parse_optional(f[5]);
      m.overhead = detail::parse_optional(f[6]);
      if (t.cells().contains(key)) throw std::invalid_argument("duplicate cell " + describe(key));
      t.set(key, m);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("reference line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return t;
}

ResultTable load_reference_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_reference_csv(in);
}

const ResultTable& reference_table() {
  static const ResultTable table = [] {
    std::istringstream in{std::string(reference_csv_text())};
    return parse_reference_csv(in);
  }();
  return table;
}

}  // namespace fanet::harness
