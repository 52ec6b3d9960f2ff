#include "fanet/harness/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

namespace fanet::harness {

mobility::MobilityConfig reference_mobility() {
  mobility::MobilityConfig m;
  m.heading_policy = mobility::HeadingPolicy::gbs_orbit;
  m.deploy_radius = 250.0;
  m.direction_sd = 0.05;
  m.speed_sd = 5.0;
  return m;
}

medium::MediumConfig reference_medium() {
  medium::MediumConfig m;
  m.broadcast_bitrate = 1e6;
  m.frame_overhead = 5.5e-4;
  return m;
}

aodv::AodvConfig reference_aodv() {
  aodv::AodvConfig a;
  a.process_shorter_duplicates = false;
  return a;
}

adversary::AttackConfig reference_attack() {
  adversary::AttackConfig a;
  a.cap_at_pool = true;
  return a;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double to_double(std::string_view v) {
  v = trim(v);
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw std::invalid_argument("expected a number, got '" + std::string(v) + "'");
  }
  return out;
}

std::uint64_t to_uint(std::string_view v) {
  v = trim(v);
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw std::invalid_argument("expected a non-negative integer, got '" + std::string(v) + "'");
  }
  return out;
}

bool to_bool(std::string_view v) {
  v = trim(v);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("expected true or false, got '" + std::string(v) + "'");
}

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string fmt(std::uint64_t v) { return std::to_string(v); }
std::string fmt(bool v) { return v ? "true" : "false"; }

template <class T, class F>
std::vector<T> to_list(std::string_view v, F parse_one) {
  std::vector<T> out;
  v = trim(v);
  if (v.empty()) return out;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    const auto comma = v.find(',', pos);
    const auto item = trim(v.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    // "a..b" expands an integer range.
    if constexpr (std::is_integral_v<T>) {
      const auto dots = item.find("..");
      if (dots != std::string_view::npos) {
        const auto lo = to_uint(item.substr(0, dots));
        const auto hi = to_uint(item.substr(dots + 2));
        if (hi < lo) throw std::invalid_argument("empty range '" + std::string(item) + "'");
        for (auto i = lo; i <= hi; ++i) out.push_back(static_cast<T>(i));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
        continue;
      }
    }
    out.push_back(parse_one(item));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

template <class T, class F>
std::string join(const std::vector<T>& xs, F format_one) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += format_one(xs[i]);
  }
  return out;
}

struct Field {
  const char* key;
  const char* doc;
  std::function<std::string(const ScenarioConfig&)> get;
  std::function<void(ScenarioConfig&, std::string_view)> set;
};

#define FANET_DOUBLE(KEY, MEMBER, DOC)                                              \
  Field {                                                                            \
    KEY, DOC, [](const ScenarioConfig& c) { return fmt(static_cast<double>(c.MEMBER)); }, \
        [](ScenarioConfig& c, std::string_view v) { c.MEMBER = to_double(v); }       \
  }
#define FANET_UINT(KEY, MEMBER, DOC)                                                          \
  Field {                                                                                      \
    KEY, DOC, [](const ScenarioConfig& c) { return fmt(static_cast<std::uint64_t>(c.MEMBER)); }, \
        [](ScenarioConfig& c, std::string_view v) {                                            \
          c.MEMBER = static_cast<decltype(c.MEMBER)>(to_uint(v));                              \
        }                                                                                      \
  }
#define FANET_BOOL(KEY, MEMBER, DOC)                                         \
  Field {                                                                     \
    KEY, DOC, [](const ScenarioConfig& c) { return fmt(static_cast<bool>(c.MEMBER)); }, \
        [](ScenarioConfig& c, std::string_view v) { c.MEMBER = to_bool(v); }  \
  }

std::string heading_name(mobility::HeadingPolicy p) {
  switch (p) {
    case mobility::HeadingPolicy::home_tether: return "home_tether";
    case mobility::HeadingPolicy::formation_loiter: return "formation_loiter";
    case mobility::HeadingPolicy::gbs_orbit: return "gbs_orbit";
    case mobility::HeadingPolicy::own_heading: break;
  }
  return "own_heading";
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      FANET_UINT("nodes", nodes, "Nodes in a single run, ground station included"),
      FANET_DOUBLE("sim_time", sim_time, "Simulated seconds"),
      FANET_UINT("seed", seed, "Seed of a single run"),
      FANET_DOUBLE("area_x", mobility.bounds.hi.x, "Area length, m"),
      FANET_DOUBLE("area_y", mobility.bounds.hi.y, "Area width, m"),
      FANET_DOUBLE("area_z", mobility.bounds.hi.z, "Area height, m"),
      FANET_DOUBLE("mean_speed", mobility.mean_speed, "Mean UAV speed, m/s"),
      FANET_DOUBLE("alpha", mobility.alpha, "Gauss-Markov memory when alpha_from_seed is false"),
      FANET_DOUBLE("alpha_start", alpha_start, "Alpha of the first seed"),
      FANET_DOUBLE("alpha_step", alpha_step, "Alpha increment per seed"),
      FANET_BOOL("alpha_from_seed", alpha_from_seed, "Derive alpha from the seed position"),
      FANET_DOUBLE("mobility_step", mobility.step_interval, "Seconds between mobility updates"),
      FANET_DOUBLE("speed_sd", mobility.speed_sd, "Speed noise, m/s"),
      FANET_DOUBLE("direction_sd", mobility.direction_sd, "Heading noise, rad"),
      FANET_DOUBLE("pitch_sd", mobility.pitch_sd, "Pitch noise, rad"),
      Field{"heading_policy", "own_heading, home_tether, formation_loiter or gbs_orbit",
            [](const ScenarioConfig& c) { return heading_name(c.mobility.heading_policy); },
            [](ScenarioConfig& c, std::string_view v) {
              v = trim(v);
              if (v == "own_heading") {
                c.mobility.heading_policy = mobility::HeadingPolicy::own_heading;
              } else if (v == "home_tether") {
                c.mobility.heading_policy = mobility::HeadingPolicy::home_tether;
              } else if (v == "gbs_orbit") {
                c.mobility.heading_policy = mobility::HeadingPolicy::gbs_orbit;
              } else if (v == "formation_loiter") {
                c.mobility.heading_policy = mobility::HeadingPolicy::formation_loiter;
              } else {
                throw std::invalid_argument("unknown heading policy '" + std::string(v) + "'");
              }
            }},
      FANET_DOUBLE("tether_radius", mobility.tether_radius, "Horizontal radius around the GBS before UAVs turn home, m"),
      FANET_DOUBLE("deploy_radius", mobility.deploy_radius, "Initial placement radius around the GBS, m (0: whole area)"),
      FANET_DOUBLE("loiter_radius", mobility.loiter_radius, "formation_loiter: circle radius, m"),
      FANET_DOUBLE("cohesion_gain", mobility.cohesion_gain, "formation_loiter: pull toward the station point, 1/s"),
      FANET_DOUBLE("orbit_reference_radius", mobility.orbit_reference_radius, "gbs_orbit: radius that flies at mean_speed, m (0: two thirds of deploy_radius)"),
      FANET_DOUBLE("range", medium.range, "Radio range, m"),
      FANET_DOUBLE("bitrate", medium.bitrate, "Unicast bit rate, bit/s"),
      FANET_DOUBLE("broadcast_bitrate", medium.broadcast_bitrate, "Broadcast bit rate, bit/s"),
      FANET_UINT("queue_capacity", medium.queue_capacity, "Transmit queue length per node, frames"),
      FANET_DOUBLE("backoff_max", medium.backoff_max, "Upper bound of carrier-sense backoff, s"),
      FANET_BOOL("propagation", medium.propagation, "Add distance / c to reception time"),
      FANET_DOUBLE("frame_overhead", medium.frame_overhead, "Fixed airtime added to every frame, s"),
      FANET_UINT("link_header_bytes", medium.link_header_bytes, "Link header per frame, bytes"),
      FANET_UINT("rreq_bytes", medium.rreq_bytes, "RREQ body, bytes"),
      FANET_UINT("rrep_bytes", medium.rrep_bytes, "RREP body, bytes"),
      FANET_UINT("rerr_bytes", medium.rerr_bytes, "RERR body, bytes"),
      FANET_DOUBLE("active_route_timeout", aodv.active_route_timeout, "Route lifetime, s"),
      FANET_UINT("pending_capacity", aodv.pending_capacity, "Packets buffered per destination during discovery"),
      FANET_UINT("rreq_retries", aodv.rreq_retries, "Discovery retries"),
      FANET_BOOL("process_shorter_duplicates", aodv.process_shorter_duplicates, "Re-forward a duplicate RREQ that arrived over fewer hops"),
      FANET_DOUBLE("node_traversal_time", aodv.node_traversal_time, "Per-hop traversal estimate, s"),
      FANET_UINT("packet_size", traffic.payload, "Application payload, bytes"),
      FANET_DOUBLE("packet_rate", traffic.rate, "Packets per second per flow"),
      FANET_UINT("flow_count", traffic.flow_count, "Number of flows"),
      FANET_DOUBLE("flow_start", traffic.start, "Flow start time, s"),
      FANET_UINT("data_ttl", traffic.ttl, "Hop limit of data packets"),
      FANET_BOOL("gbs_relay", traffic.gbs_relay, "Destinations forward each received packet to the GBS"),
      FANET_BOOL("count_gbs_leg", count_gbs_leg, "Include the GBS leg in PDR and E2E"),
      Field{"attack", "none, sinkhole, dropping, blackhole or flooding",
            [](const ScenarioConfig& c) { return std::string(adversary::to_string(c.attack.kind)); },
            [](ScenarioConfig& c, std::string_view v) {
              auto k = adversary::parse_attack_kind(trim(v));
              if (!k) throw std::invalid_argument("unknown attack '" + std::string(trim(v)) + "'");
              c.attack.kind = *k;
            }},
      FANET_DOUBLE("attack_ratio", attack.ratio, "Fraction of nodes that are attackers"),
      Field{"placement", "random or on_active_route",
            [](const ScenarioConfig& c) { return std::string(adversary::to_string(c.attack.placement)); },
            [](ScenarioConfig& c, std::string_view v) {
              auto p = adversary::parse_placement(trim(v));
              if (!p) throw std::invalid_argument("unknown placement '" + std::string(trim(v)) + "'");
              c.attack.placement = *p;
            }},
      FANET_DOUBLE("drop_probability", attack.drop_probability, "Dropping attack: probability of discarding a relayed packet"),
      FANET_UINT("seq_boost", attack.seq_boost, "Sinkhole: added to the requested sequence number"),
      FANET_UINT("flood_burst", attack.flood_burst, "Flooding: RREQs per burst"),
      FANET_DOUBLE("flood_period", attack.flood_period, "Flooding: seconds between bursts"),
      FANET_DOUBLE("flood_start", attack.flood_start, "Flooding: first burst, s"),
      FANET_BOOL("flood_nonexistent", attack.flood_nonexistent_targets, "Flooding: target ids that match no node"),
      FANET_DOUBLE("snapshot_time", attack.snapshot_time, "On-route placement: when relays are observed, s"),
      FANET_BOOL("cap_attackers_at_pool", attack.cap_at_pool, "Use the whole eligible pool when the ratio asks for more attackers"),
      Field{"seeds", "Sweep seeds, e.g. 1..10",
            [](const ScenarioConfig& c) { return join(c.seeds, [](std::uint64_t s) { return fmt(s); }); },
            [](ScenarioConfig& c, std::string_view v) { c.seeds = to_list<std::uint64_t>(v, to_uint); }},
      Field{"densities", "Sweep node counts",
            [](const ScenarioConfig& c) {
              return join(c.densities, [](std::size_t s) { return fmt(static_cast<std::uint64_t>(s)); });
            },
            [](ScenarioConfig& c, std::string_view v) {
              c.densities = to_list<std::size_t>(v, [](std::string_view s) { return static_cast<std::size_t>(to_uint(s)); });
            }},
      Field{"attacks", "Sweep attack kinds",
            [](const ScenarioConfig& c) {
              return join(c.attacks, [](adversary::AttackKind k) { return std::string(adversary::to_string(k)); });
            },
            [](ScenarioConfig& c, std::string_view v) {
              c.attacks = to_list<adversary::AttackKind>(v, [](std::string_view s) {
                auto k = adversary::parse_attack_kind(s);
                if (!k || *k == adversary::AttackKind::none) {
                  throw std::invalid_argument("unknown attack '" + std::string(s) + "'");
                }
                return *k;
              });
            }},
      Field{"ratios", "Sweep attacker ratios",
            [](const ScenarioConfig& c) { return join(c.ratios, [](double r) { return fmt(r); }); },
            [](ScenarioConfig& c, std::string_view v) { c.ratios = to_list<double>(v, to_double); }},
      FANET_BOOL("sweep_on_route_dropping", sweep_on_route_dropping, "Also sweep dropping with on_active_route placement"),
      Field{"output_dir", "Directory for CSV and chart output",
            [](const ScenarioConfig& c) { return c.output_dir.string(); },
            [](ScenarioConfig& c, std::string_view v) { c.output_dir = std::string(trim(v)); }},
  };
  return table;
}

#undef FANET_DOUBLE
#undef FANET_UINT
#undef FANET_BOOL

std::string describe(const std::vector<ConfigIssue>& issues) {
  std::ostringstream os;
  os << "invalid configuration:";
  for (const auto& i : issues) {
    os << "\n  ";
    if (i.line) os << "line " << i.line << ": ";
    if (!i.key.empty()) os << i.key << ": ";
    os << i.message;
  }
  return os.str();
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error(describe(issues)), issues_(std::move(issues)) {}

double ScenarioConfig::alpha_for_seed(std::uint64_t s) const {
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (seeds[i] == s) return alpha_start + alpha_step * static_cast<double>(i);
  }
  // Seeds outside the list continue the schedule from seed 1.
  return alpha_start + alpha_step * static_cast<double>(s > 0 ? s - 1 : 0);
}

ScenarioConfig ScenarioConfig::for_run(std::uint64_t run_seed) const {
  ScenarioConfig c = *this;
  c.seed = run_seed;
  if (alpha_from_seed) c.mobility.alpha = alpha_for_seed(run_seed);
  c.traffic.stop = sim_time;
  c.mobility.home = mobility::place_gbs(c.mobility.bounds);
  return c;
}

void set_value(ScenarioConfig& cfg, std::string_view key, std::string_view value) {
  for (const Field& f : fields()) {
    if (key == f.key) {
      f.set(cfg, value);
      return;
    }
  }
  throw std::invalid_argument("unknown key");
}

std::vector<ConfigIssue> validate(const ScenarioConfig& c) {
  std::vector<ConfigIssue> out;
  auto fail = [&](const char* key, std::string msg) { out.push_back({0, key, std::move(msg)}); };
  // UAVs (GBS excluded) must cover distinct flow endpoints plus one relay.
  const std::size_t needed = 2 * c.traffic.flow_count + 2;
  if (c.nodes < needed) fail("nodes", "need at least " + std::to_string(needed) + " nodes for the configured flows");
  if (!(c.sim_time > 0.0)) fail("sim_time", "must be positive");
  if (c.sim_time <= c.traffic.start) fail("sim_time", "must exceed flow_start, otherwise no flow can start");
  if (!(c.mobility.alpha >= 0.0 && c.mobility.alpha <= 1.0)) fail("alpha", "must lie in [0, 1]");
  if (c.alpha_from_seed) {
    const double last = c.alpha_start + c.alpha_step * static_cast<double>(c.seeds.empty() ? 0 : c.seeds.size() - 1);
    if (c.alpha_start < 0.0 || c.alpha_start > 1.0 || last < 0.0 || last > 1.0 + 1e-12) {
      fail("alpha_step", "alpha schedule leaves [0, 1]");
    }
  }
  if (!(c.mobility.step_interval > 0.0)) fail("mobility_step", "must be positive");
  if (c.mobility.mean_speed < 0.0) fail("mean_speed", "must be non-negative");
  if (c.mobility.bounds.hi.x <= 0.0 || c.mobility.bounds.hi.y <= 0.0 || c.mobility.bounds.hi.z < 0.0) {
    fail("area_x", "area dimensions must be positive");
  }
  if (c.mobility.speed_sd < 0.0 || c.mobility.direction_sd < 0.0 || c.mobility.pitch_sd < 0.0) {
    fail("speed_sd", "noise levels must be non-negative");
  }
  if (!(c.medium.range > 0.0)) fail("range", "must be positive");
  if (!(c.medium.bitrate > 0.0)) fail("bitrate", "must be positive");
  if (!(c.medium.broadcast_bitrate > 0.0)) fail("broadcast_bitrate", "must be positive");
  if (c.medium.queue_capacity == 0) fail("queue_capacity", "must be at least 1");
  if (c.medium.backoff_max < 0.0) fail("backoff_max", "must be non-negative");
  if (!(c.traffic.rate > 0.0)) fail("packet_rate", "must be positive");
  if (c.traffic.ttl == 0) fail("data_ttl", "must be at least 1");
  if (c.aodv.pending_capacity == 0) fail("pending_capacity", "must be at least 1");
  if (!(c.aodv.active_route_timeout > 0.0)) fail("active_route_timeout", "must be positive");
  if (c.attack.ratio < 0.0 || c.attack.ratio > 1.0) fail("attack_ratio", "must lie in [0, 1]");
  if (c.attack.drop_probability < 0.0 || c.attack.drop_probability > 1.0) fail("drop_probability", "must lie in [0, 1]");
  if (c.attack.flood_burst == 0) fail("flood_burst", "must be at least 1");
  if (!(c.attack.flood_period > 0.0)) fail("flood_period", "must be positive");
  for (double r : c.ratios) {
    if (r < 0.0 || r > 1.0) fail("ratios", "every ratio must lie in [0, 1]");
  }
  for (std::size_t d : c.densities) {
    if (d < needed) fail("densities", "every density needs at least " + std::to_string(needed) + " nodes");
  }
  if (c.seeds.empty()) fail("seeds", "must not be empty");
  if (c.densities.empty()) fail("densities", "must not be empty");
  return out;
}

ScenarioConfig parse_config(std::istream& in, ScenarioConfig base) {
  std::vector<ConfigIssue> issues;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      issues.push_back({line_no, "", "expected 'key = value'"});
      continue;
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    try {
      set_value(base, key, value);
    } catch (const std::exception& e) {
      issues.push_back({line_no, std::string(key), e.what()});
    }
  }
  if (issues.empty()) issues = validate(base);
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return base;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({{0, "", "cannot open " + path.string()}});
  return parse_config(in);
}

std::vector<std::pair<std::string, std::string>> serialize(const ScenarioConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const Field& f : fields()) out.emplace_back(f.key, f.get(cfg));
  return out;
}

void write_config(std::ostream& out, const ScenarioConfig& cfg) {
  for (const auto& [k, v] : serialize(cfg)) out << k << " = " << v << '\n';
}

std::vector<KeyDoc> documented_keys() {
  std::vector<KeyDoc> out;
  for (const Field& f : fields()) out.push_back({f.key, f.doc});
  return out;
}

}  // namespace fanet::harness
