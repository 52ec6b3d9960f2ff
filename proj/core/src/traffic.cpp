#include "fanet/workload/traffic.hpp"

#include <cmath>

namespace fanet::workload {

std::uint64_t Flow::packet_count() const {
  if (rate <= 0.0 || stop <= start) return 0;
  const double span = (stop - start) * rate;
  auto n = static_cast<std::uint64_t>(std::ceil(span - 1e-9));
  return n;
}

std::vector<Flow> setup_flows(std::size_t uav_count, NodeId gbs, engine::RngStream& rng, const TrafficConfig& cfg) {
  const std::size_t needed = 2 * cfg.flow_count + 1;
  if (uav_count < needed) {
    throw InsufficientNodes("need at least " + std::to_string(needed) + " UAVs for " +
                            std::to_string(cfg.flow_count) + " flows, have " + std::to_string(uav_count));
  }
  if (cfg.rate <= 0.0) throw std::invalid_argument("packet rate must be positive");

  std::vector<NodeId> ids;
  ids.reserve(uav_count);
  for (std::size_t i = 0; i < uav_count; ++i) {
    if (static_cast<NodeId>(i) != gbs) ids.push_back(static_cast<NodeId>(i));
  }
  for (std::size_t i = ids.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(i - 1)));
    std::swap(ids[i - 1], ids[j]);
  }

  std::vector<Flow> flows;
  flows.reserve(cfg.flow_count);
  for (std::size_t i = 0; i < cfg.flow_count; ++i) {
    Flow f;
    f.id = static_cast<std::uint32_t>(i);
    f.source = ids[i];
    f.destination = ids[cfg.flow_count + i];
    f.rate = cfg.rate;
    f.payload = cfg.payload;
    f.start = cfg.start;
    f.stop = cfg.stop;
    flows.push_back(f);
  }
  return flows;
}

bool MetricsReport::conserved() const {
  if (fate_violations != 0) return false;
  for (const FlowLedger& f : flows) {
    if (!f.balanced()) return false;
  }
  return true;
}

double pdr(const MetricsReport& report) {
  if (report.app_packets_sent == 0) throw MetricsError("pdr undefined: no application packets sent");
  return static_cast<double>(report.app_packets_received) / static_cast<double>(report.app_packets_sent);
}

std::optional<double> e2e(const MetricsReport& report) {
  if (report.app_packets_received == 0) return std::nullopt;
  return report.delay_sum / static_cast<double>(report.app_packets_received);
}

std::optional<double> overhead(const MetricsReport& report) {
  if (report.data_received == 0) return std::nullopt;
  return static_cast<double>(report.control_received) / static_cast<double>(report.data_received);
}

MetricsRecorder::MetricsRecorder(const engine::Simulator& clock, std::size_t flow_count, bool count_gbs_leg)
    : clock_(clock), count_gbs_leg_(count_gbs_leg), flows_(flow_count * 2) {}

FlowLedger& MetricsRecorder::ledger(const DataPacket& packet) {
  return flows_.at(static_cast<std::size_t>(packet.flow) * 2 + (packet.leg == Leg::gbs ? 1 : 0));
}

void MetricsRecorder::packet_originated(const DataPacket& packet) {
  if (packet.id != fates_.size()) throw std::logic_error("packet ids must be dense and increasing");
  fates_.push_back(Fate::in_transit);
  pending_seen_.push_back(0);
  ++ledger(packet).originated;
  if (count_gbs_leg_ || packet.leg == Leg::flow) ++totals_.app_packets_sent;
}

void MetricsRecorder::set_fate(const DataPacket& packet, Fate fate) {
  if (packet.id >= fates_.size() || fates_[packet.id] != Fate::in_transit) {
    ++totals_.fate_violations;
    return;
  }
  fates_[packet.id] = fate;
}

void MetricsRecorder::data_delivered(NodeId /*at*/, const DataPacket& packet) {
  set_fate(packet, Fate::delivered);
  ++ledger(packet).delivered;
  if (count_gbs_leg_ || packet.leg == Leg::flow) {
    ++totals_.app_packets_received;
    totals_.delay_sum += clock_.now() - packet.created;
  }
}

void MetricsRecorder::data_dropped(NodeId /*at*/, const DataPacket& packet, aodv::DropReason reason) {
  FlowLedger& l = ledger(packet);
  switch (reason) {
    case aodv::DropReason::attacker:
      set_fate(packet, Fate::dropped_attacker);
      ++l.dropped_attacker;
      ++totals_.drops_attacker;
      break;
    case aodv::DropReason::overflow:
      set_fate(packet, Fate::dropped_overflow);
      ++l.dropped_overflow;
      ++totals_.drops_overflow;
      break;
    case aodv::DropReason::lost_range:
      set_fate(packet, Fate::lost_range);
      ++l.lost_range;
      ++totals_.losses_range;
      break;
    case aodv::DropReason::no_route:
      set_fate(packet, Fate::no_route);
      ++l.no_route;
      ++totals_.drops_no_route;
      break;
    case aodv::DropReason::ttl_expired:
      set_fate(packet, Fate::ttl_expired);
      ++l.ttl_expired;
      ++totals_.drops_ttl;
      break;
  }
}

void MetricsRecorder::frame_received(NodeId /*at*/, const Frame& frame) {
  if (frame.kind == FrameKind::data) {
    ++totals_.data_received;
  } else {
    ++totals_.control_received;
  }
}

void MetricsRecorder::note_pending(const DataPacket& packet) {
  if (packet.id >= fates_.size() || fates_[packet.id] != Fate::in_transit || pending_seen_[packet.id] != 0) {
    ++totals_.fate_violations;
    return;
  }
  pending_seen_[packet.id] = 1;
  ++ledger(packet).pending_at_end;
  ++totals_.pending_at_end;
}

MetricsReport MetricsRecorder::report() const {
  MetricsReport out = totals_;
  out.flows = flows_;
  for (std::size_t i = 0; i < fates_.size(); ++i) {
    if (fates_[i] == Fate::in_transit && pending_seen_[i] == 0) ++out.fate_violations;
  }
  return out;
}

TrafficGenerator::TrafficGenerator(std::vector<Flow> flows, NodeId gbs, TrafficConfig cfg, MetricsRecorder& recorder,
                                   SendFn send)
    : flows_(std::move(flows)), gbs_(gbs), cfg_(cfg), recorder_(recorder), send_(std::move(send)) {}

void TrafficGenerator::attach(engine::Simulator& sim) {
  for (std::size_t i = 0; i < flows_.size(); ++i) {
    if (flows_[i].packet_count() > 0) schedule_emission(sim, i, 0);
  }
}

void TrafficGenerator::schedule_emission(engine::Simulator& sim, std::size_t flow, std::uint64_t k) {
  const Flow& f = flows_[flow];
  sim.schedule(
      f.start + static_cast<double>(k) / f.rate,
      [this, &sim, flow, k] {
        const Flow& fl = flows_[flow];
        emit(sim.now(), fl.id, Leg::flow, fl.source, fl.destination);
        if (k + 1 < fl.packet_count()) schedule_emission(sim, flow, k + 1);
      },
      engine::EventKind::traffic_emission);
}

void TrafficGenerator::emit(engine::SimTime now, std::uint32_t flow, Leg leg, NodeId from, NodeId to) {
  DataPacket p;
  p.id = next_id_++;
  p.flow = flow;
  p.leg = leg;
  p.source = from;
  p.destination = to;
  p.payload_bytes = cfg_.payload;
  p.created = now;
  p.ttl = cfg_.ttl;
  recorder_.packet_originated(p);
  send_(from, p);
}

void TrafficGenerator::on_delivered(engine::Simulator& sim, NodeId at, const DataPacket& packet) {
  if (!cfg_.gbs_relay || packet.leg != Leg::flow || at == gbs_) return;
  emit(sim.now(), packet.flow, Leg::gbs, at, gbs_);
}

}  // namespace fanet::workload
