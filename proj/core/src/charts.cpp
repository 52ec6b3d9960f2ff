#include "fanet/harness/charts.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

namespace fanet::harness {
namespace {

constexpr double kPanelW = 420.0;
constexpr double kPanelH = 300.0;
constexpr double kLeft = 64.0;
constexpr double kRight = 16.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 46.0;
constexpr double kLegendW = 190.0;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (ratio %, value)
};

std::optional<double> value_of(const Aggregate& a, ChartMetric m) {
  switch (m) {
    case ChartMetric::pdr: return a.pdr.mean * 100.0;
    case ChartMetric::e2e: return a.e2e.n ? std::optional<double>(a.e2e.mean) : std::nullopt;
    case ChartMetric::overhead: return a.overhead.n ? std::optional<double>(a.overhead.mean) : std::nullopt;
  }
  return std::nullopt;
}

const char* title_of(ChartMetric m) {
  switch (m) {
    case ChartMetric::pdr: return "Packet delivery ratio (%)";
    case ChartMetric::e2e: return "End-to-end delay (s)";
    case ChartMetric::overhead: return "Routing overhead (control / data receptions)";
  }
  return "";
}

std::string series_label(const CellKey& k) {
  std::string s(adversary::to_string(k.attack));
  if (k.placement == adversary::Placement::on_active_route) s += " (on route)";
  return s;
}

double nice_step(double span) {
  if (span <= 0.0) return 1.0;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double f : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= f * mag) return f * mag;
  }
  return 10.0 * mag;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

// Panels per density; series keyed by label so colors match across panels.
std::map<std::size_t, std::map<std::string, Series>> collect(const std::vector<Aggregate>& aggregates, ChartMetric m) {
  std::map<std::size_t, std::map<std::string, Series>> panels;
  std::map<std::size_t, double> baseline;
  for (const Aggregate& a : aggregates) {
    if (a.key.attack == adversary::AttackKind::none) {
      if (auto v = value_of(a, m)) baseline[a.key.nodes] = *v;
    }
  }
  for (const Aggregate& a : aggregates) {
    if (a.key.attack == adversary::AttackKind::none) continue;
    const auto v = value_of(a, m);
    if (!v) continue;
    Series& s = panels[a.key.nodes][series_label(a.key)];
    s.label = series_label(a.key);
    s.points.emplace_back(a.key.ratio_pct, *v);
  }
  for (auto& [nodes, series] : panels) {
    for (auto& [label, s] : series) {
      const bool has_zero = std::any_of(s.points.begin(), s.points.end(), [](const auto& p) { return p.first == 0.0; });
      if (!has_zero && baseline.contains(nodes)) s.points.emplace_back(0.0, baseline[nodes]);
      std::sort(s.points.begin(), s.points.end());
    }
  }
  // A baseline-only density still gets a panel.
  for (const auto& [nodes, v] : baseline) {
    if (!panels.contains(nodes)) panels[nodes]["baseline"] = Series{"baseline", {{0.0, v}}};
  }
  return panels;
}

}  // namespace

void write_chart_svg(std::ostream& out, const std::vector<Aggregate>& aggregates, ChartMetric metric) {
  const auto panels = collect(aggregates, metric);
  std::set<std::string> labels;
  double x_max = 5.0;
  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -std::numeric_limits<double>::infinity();
  for (const auto& [nodes, series] : panels) {
    for (const auto& [label, s] : series) {
      labels.insert(label);
      for (const auto& [x, y] : s.points) {
        x_max = std::max(x_max, x);
        y_min = std::min(y_min, y);
        y_max = std::max(y_max, y);
      }
    }
  }
  if (!std::isfinite(y_min)) {
    y_min = 0.0;
    y_max = 1.0;
  }
  // Flooding overhead can dwarf every other series; switch to a log axis.
  const bool log_y = y_min > 0.0 && y_max / y_min > 50.0;
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;
  if (log_y) {
    lo = std::floor(std::log10(y_min));
    hi = std::ceil(std::log10(y_max));
    if (hi <= lo) hi = lo + 1.0;
    step = 1.0;
  } else {
    lo = metric == ChartMetric::pdr ? std::min(y_min, 100.0) : 0.0;
    hi = std::max(y_max, lo + 1e-9);
    step = nice_step(hi - lo);
    lo = std::floor(lo / step) * step;
    hi = std::ceil(hi / step) * step;
    if (hi <= lo) hi = lo + step;
  }
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };

  std::map<std::string, const char*> color;
  std::size_t ci = 0;
  for (const auto& l : labels) color[l] = kColors[ci++ % std::size(kColors)];

  const double width = static_cast<double>(std::max<std::size_t>(panels.size(), 1)) * kPanelW + kLegendW;
  const double height = kPanelH + 30.0;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">" << escape(title_of(metric))
      << (log_y ? " (log scale)" : "") << "</text>\n";

  double ox = 0.0;
  for (const auto& [nodes, series] : panels) {
    const double x0 = ox + kLeft;
    const double x1 = ox + kPanelW - kRight;
    const double y0 = 30.0 + kPanelH - kBottom;
    const double y1 = 30.0 + kTop;
    auto px = [&](double x) { return x0 + (x1 - x0) * x / x_max; };
    auto py = [&](double y) { return y0 - (y0 - y1) * (ty(y) - lo) / (hi - lo); };

    out << "<g>\n<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << y1 - 10 << "\" text-anchor=\"middle\">" << nodes
        << " nodes</text>\n";
    out << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0 << "\" height=\"" << y0 - y1
        << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (double t = lo; t <= hi + step * 1e-6; t += step) {
      const double v = log_y ? std::pow(10.0, t) : t;
      const double y = py(v);
      out << "<line x1=\"" << x0 << "\" x2=\"" << x1 << "\" y1=\"" << y << "\" y2=\"" << y
          << "\" stroke=\"#ddd\"/>\n";
      out << "<text x=\"" << x0 - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << fmt(v) << "</text>\n";
    }
    for (double t = 0.0; t <= x_max + 1e-9; t += 5.0) {
      out << "<text x=\"" << px(t) << "\" y=\"" << y0 + 16 << "\" text-anchor=\"middle\">" << fmt(t) << "</text>\n";
    }
    out << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << y0 + 34 << "\" text-anchor=\"middle\">attacker ratio (%)</text>\n";
    for (const auto& [label, s] : series) {
      out << "<polyline fill=\"none\" stroke-width=\"2\" stroke=\"" << color[label] << "\" points=\"";
      for (const auto& [x, y] : s.points) out << px(x) << ',' << py(y) << ' ';
      out << "\"/>\n";
      for (const auto& [x, y] : s.points) {
        out << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << color[label] << "\"/>\n";
      }
    }
    out << "</g>\n";
    ox += kPanelW;
  }

  double ly = 30.0 + kTop + 10.0;
  for (const auto& [label, c] : color) {
    out << "<line x1=\"" << ox + 10 << "\" x2=\"" << ox + 34 << "\" y1=\"" << ly << "\" y2=\"" << ly << "\" stroke=\"" << c
        << "\" stroke-width=\"3\"/>\n";
    out << "<text x=\"" << ox + 40 << "\" y=\"" << ly + 4 << "\">" << escape(label) << "</text>\n";
    ly += 20.0;
  }
  out << "</svg>\n";
}

ChartOutput emit_charts(const std::vector<Aggregate>& aggregates, const std::filesystem::path& dir) {
  ChartOutput result;
  if (aggregates.empty()) {
    result.warnings.push_back("no aggregates, no charts written");
    return result;
  }
  std::filesystem::create_directories(dir);
  const std::pair<ChartMetric, const char*> charts[] = {
      {ChartMetric::pdr, "pdr.svg"}, {ChartMetric::e2e, "e2e.svg"}, {ChartMetric::overhead, "overhead.svg"}};
  for (const auto& [metric, name] : charts) {
    const auto path = dir / name;
    std::ofstream out(path);
    if (!out) {
      result.warnings.push_back("cannot write " + path.string());
      continue;
    }
    write_chart_svg(out, aggregates, metric);
    result.files.push_back(path);
  }
  return result;
}

}  // namespace fanet::harness
