#include "fanet/harness/results.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "fanet/harness/simulation.hpp"
#include "text.hpp"

namespace fanet::harness {

int ratio_percent(double ratio) { return static_cast<int>(std::lround(ratio * 100.0)); }

CellKey baseline_key(std::size_t nodes) { return CellKey{nodes, adversary::AttackKind::none, adversary::Placement::random, 0}; }

std::string describe(const CellKey& key) {
  std::string s = std::to_string(key.nodes) + " nodes, " + std::string(adversary::to_string(key.attack));
  if (key.placement != adversary::Placement::random) s += " (" + std::string(adversary::to_string(key.placement)) + ")";
  if (key.attack != adversary::AttackKind::none) s += " @" + std::to_string(key.ratio_pct) + "%";
  return s;
}

const CellMetrics* ResultTable::find(const CellKey& key) const {
  if (auto it = cells_.find(key); it != cells_.end()) return &it->second;
  if (key.ratio_pct == 0 && key.attack != adversary::AttackKind::none) {
    if (auto it = cells_.find(baseline_key(key.nodes)); it != cells_.end()) return &it->second;
  }
  return nullptr;
}

Stat summarize(const std::vector<double>& values) {
  Stat s;
  s.n = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return s;
}

std::vector<Aggregate> aggregate(const std::vector<RunResult>& runs) {
  struct Acc {
    std::vector<double> pdr, e2e, overhead;
    bool conserved = true;
  };
  std::map<CellKey, Acc> groups;
  for (const RunResult& r : runs) {
    const CellKey key{r.nodes, r.attack, r.placement, ratio_percent(r.ratio)};
    Acc& a = groups[key];
    a.pdr.push_back(r.pdr);
    if (r.e2e) a.e2e.push_back(*r.e2e);
    if (r.overhead) a.overhead.push_back(*r.overhead);
    a.conserved = a.conserved && r.report.conserved();
  }
  std::vector<Aggregate> out;
  out.reserve(groups.size());
  for (const auto& [key, acc] : groups) {
    Aggregate g;
    g.key = key;
    g.runs = acc.pdr.size();
    g.pdr = summarize(acc.pdr);
    g.e2e = summarize(acc.e2e);
    g.overhead = summarize(acc.overhead);
    g.all_conserved = acc.conserved;
    out.push_back(g);
  }
  return out;
}

ResultTable to_table(const std::vector<Aggregate>& aggregates) {
  ResultTable t;
  for (const Aggregate& a : aggregates) {
    CellMetrics m;
    m.pdr = a.pdr.mean;
    if (a.e2e.n > 0) m.e2e = a.e2e.mean;
    if (a.overhead.n > 0) m.overhead = a.overhead.mean;
    t.set(a.key, m);
  }
  return t;
}

std::string aggregate_csv_header() {
  return "nodes,attack,placement,ratio,runs,pdr_mean,pdr_sd,e2e_mean,e2e_sd,e2e_runs,overhead_mean,overhead_sd,"
         "overhead_runs,conserved";
}

std::string aggregate_csv_row(const Aggregate& a) {
  using detail::num;
  std::string s = std::to_string(a.key.nodes) + ',' + std::string(adversary::to_string(a.key.attack)) + ',' +
                  std::string(adversary::to_string(a.key.placement)) + ',' + num(a.key.ratio_pct / 100.0) + ',' +
                  std::to_string(a.runs) + ',';
  s += num(a.pdr.mean) + ',' + num(a.pdr.sd) + ',';
  s += (a.e2e.n ? num(a.e2e.mean) : "NA") + ',' + (a.e2e.n ? num(a.e2e.sd) : "NA") + ',' + std::to_string(a.e2e.n) + ',';
  s += (a.overhead.n ? num(a.overhead.mean) : "NA") + ',' + (a.overhead.n ? num(a.overhead.sd) : "NA") + ',' +
       std::to_string(a.overhead.n) + ',';
  s += a.all_conserved ? "1" : "0";
  return s;
}

void write_aggregate_csv(std::ostream& out, const std::vector<Aggregate>& aggregates) {
  out << aggregate_csv_header() << '\n';
  for (const Aggregate& a : aggregates) out << aggregate_csv_row(a) << '\n';
}

std::vector<Aggregate> read_aggregate_csv(std::istream& in) {
  std::vector<Aggregate> out;
  std::string line;
  std::size_t line_no = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    if (header) {
      if (detail::trim(line) != aggregate_csv_header()) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": unexpected aggregate header");
      }
      header = false;
      continue;
    }
    try {
      const auto f = detail::split(line);
      if (f.size() != 14) throw std::invalid_argument("expected 14 fields, got " + std::to_string(f.size()));
      Aggregate a;
      a.key.nodes = detail::parse_uint(f[0]);
      const auto kind = adversary::parse_attack_kind(f[1]);
      const auto placement = adversary::parse_placement(f[2]);
      if (!kind) throw std::invalid_argument("unknown attack '" + std::string(f[1]) + "'");
      if (!placement) throw std::invalid_argument("unknown placement '" + std::string(f[2]) + "'");
      a.key.attack = *kind;
      a.key.placement = *placement;
      a.key.ratio_pct = ratio_percent(detail::parse_double(f[3]));
      a.runs = detail::parse_uint(f[4]);
      a.pdr = Stat{detail::parse_double(f[5]), detail::parse_double(f[6]), a.runs};
      a.e2e.n = detail::parse_uint(f[9]);
      if (a.e2e.n) a.e2e = Stat{detail::parse_double(f[7]), detail::parse_double(f[8]), a.e2e.n};
      a.overhead.n = detail::parse_uint(f[12]);
      if (a.overhead.n) a.overhead = Stat{detail::parse_double(f[10]), detail::parse_double(f[11]), a.overhead.n};
      a.all_conserved = detail::trim(f[13]) == "1";
      out.push_back(a);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<Aggregate> load_aggregate_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_aggregate_csv(in);
}

}  // namespace fanet::harness
