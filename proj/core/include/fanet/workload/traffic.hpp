#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fanet/aodv/agent.hpp"
#include "fanet/engine/rng.hpp"
#include "fanet/engine/simulator.hpp"
#include "fanet/medium/frame.hpp"

namespace fanet::workload {

struct Flow {
  std::uint32_t id = 0;
  NodeId source = kNoNode;
  NodeId destination = kNoNode;
  double rate = 1.0;       // packets/s
  std::uint32_t payload = 512;
  double start = 10.0;
  double stop = 1800.0;

  /// Emission times start + k / rate strictly before stop.
  [[nodiscard]] std::uint64_t packet_count() const;
};

struct TrafficConfig {
  std::size_t flow_count = 10;
  double rate = 1.0;
  std::uint32_t payload = 512;
  double start = 10.0;
  double stop = 1800.0;
  std::uint8_t ttl = 32;
  /// Each flow packet received at its destination triggers one packet to the GBS.
  bool gbs_relay = true;
};

class InsufficientNodes : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Draws flow_count (source, destination) pairs from the UAV ids
/// [0, uav_count), every endpoint distinct. At least one node must be left
/// over as a relay.
std::vector<Flow> setup_flows(std::size_t uav_count, NodeId gbs, engine::RngStream& rng, const TrafficConfig& cfg);

/// Fate of a single application packet.
enum class Fate : std::uint8_t { in_transit, delivered, dropped_attacker, dropped_overflow, lost_range, no_route, ttl_expired };

/// Per-(flow, leg) packet accounting.
struct FlowLedger {
  std::uint64_t originated = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped_attacker = 0;
  std::uint64_t lost_range = 0;
  std::uint64_t dropped_overflow = 0;
  std::uint64_t no_route = 0;
  std::uint64_t ttl_expired = 0;
  /// Found queued or buffered when the run stopped, counted independently of fates.
  std::uint64_t pending_at_end = 0;

  [[nodiscard]] std::uint64_t accounted() const {
    return delivered + dropped_attacker + lost_range + dropped_overflow + no_route + ttl_expired + pending_at_end;
  }
  [[nodiscard]] bool balanced() const { return originated == accounted(); }
};

struct MetricsReport {
  std::uint64_t app_packets_sent = 0;
  std::uint64_t app_packets_received = 0;
  double delay_sum = 0.0;
  std::uint64_t control_received = 0;
  std::uint64_t data_received = 0;

  std::uint64_t drops_attacker = 0;
  std::uint64_t drops_overflow = 0;
  std::uint64_t losses_range = 0;
  std::uint64_t drops_no_route = 0;
  std::uint64_t drops_ttl = 0;
  std::uint64_t pending_at_end = 0;
  /// Packets whose fate was set twice or never reconciled; always zero in a correct run.
  std::uint64_t fate_violations = 0;

  /// Indexed by flow * 2 + leg.
  std::vector<FlowLedger> flows;

  [[nodiscard]] bool conserved() const;
};

class MetricsError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Delivered over sent; throws MetricsError when nothing was sent.
double pdr(const MetricsReport& report);
/// Mean delay of delivered packets; empty when none arrived.
std::optional<double> e2e(const MetricsReport& report);
/// Control receptions per data reception; empty when no data was received.
std::optional<double> overhead(const MetricsReport& report);

/// Observer that tracks every packet's fate and every reception.
class MetricsRecorder : public aodv::Observer {
 public:
  MetricsRecorder(const engine::Simulator& clock, std::size_t flow_count, bool count_gbs_leg = true);

  /// Called by the traffic generator when the application hands a packet down.
  void packet_originated(const DataPacket& packet);

  void data_delivered(NodeId at, const DataPacket& packet) override;
  void data_dropped(NodeId at, const DataPacket& packet, aodv::DropReason reason) override;
  void frame_received(NodeId at, const Frame& frame) override;

  /// A packet still queued or buffered at run end.
  void note_pending(const DataPacket& packet);

  /// Final report. Packets left in_transit without a matching note_pending
  /// (or noted pending with a terminal fate) count as fate violations.
  [[nodiscard]] MetricsReport report() const;

  [[nodiscard]] Fate fate(std::uint64_t packet_id) const { return fates_.at(packet_id); }
  [[nodiscard]] std::uint64_t originated() const { return fates_.size(); }

 private:
  FlowLedger& ledger(const DataPacket& packet);
  void set_fate(const DataPacket& packet, Fate fate);

  const engine::Simulator& clock_;
  bool count_gbs_leg_;
  std::vector<Fate> fates_;
  std::vector<std::uint8_t> pending_seen_;
  std::vector<FlowLedger> flows_;
  MetricsReport totals_;
};

/// CBR sources for every flow, plus the one-for-one destination to GBS leg.
class TrafficGenerator {
 public:
  using SendFn = std::function<void(NodeId from, DataPacket packet)>;

  TrafficGenerator(std::vector<Flow> flows, NodeId gbs, TrafficConfig cfg, MetricsRecorder& recorder, SendFn send);

  /// Schedules every emission of every flow.
  void attach(engine::Simulator& sim);

  /// Hook for a node's delivery callback.
  void on_delivered(engine::Simulator& sim, NodeId at, const DataPacket& packet);

  [[nodiscard]] const std::vector<Flow>& flows() const { return flows_; }

 private:
  void schedule_emission(engine::Simulator& sim, std::size_t flow, std::uint64_t k);
  void emit(engine::SimTime now, std::uint32_t flow, Leg leg, NodeId from, NodeId to);

  std::vector<Flow> flows_;
  NodeId gbs_;
  TrafficConfig cfg_;
  MetricsRecorder& recorder_;
  SendFn send_;
  std::uint64_t next_id_ = 0;
};

}  // namespace fanet::workload
