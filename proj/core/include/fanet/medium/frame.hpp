#pragma once

#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include "fanet/engine/simulator.hpp"
#include "fanet/types.hpp"

namespace fanet {

enum class FrameKind : std::uint8_t { data, rreq, rrep, rerr };

std::string_view to_string(FrameKind kind);

/// Which application leg a data packet belongs to.
enum class Leg : std::uint8_t {
  flow,  // source -> destination
  gbs,   // destination -> ground station
};

/// Application packet routed hop by hop.
struct DataPacket {
  std::uint64_t id = 0;
  std::uint32_t flow = 0;
  Leg leg = Leg::flow;
  NodeId source = kNoNode;
  NodeId destination = kNoNode;
  std::uint32_t payload_bytes = 512;
  engine::SimTime created = 0.0;
  std::uint8_t ttl = 32;
};

struct Rreq {
  NodeId originator = kNoNode;
  std::uint32_t orig_seq = 0;
  std::uint32_t rreq_id = 0;
  NodeId destination = kNoNode;
  std::uint32_t last_known_dest_seq = 0;
  bool unknown_seq = true;
  /// Only the destination itself may answer.
  bool destination_only = false;
  std::uint8_t hop_count = 0;
};

struct Rrep {
  NodeId destination = kNoNode;
  std::uint32_t dest_seq = 0;
  NodeId originator = kNoNode;
  std::uint8_t hop_count = 0;
  double lifetime = 0.0;
};

struct Unreachable {
  NodeId destination = kNoNode;
  std::uint32_t dest_seq = 0;
  friend bool operator==(const Unreachable&, const Unreachable&) = default;
};

struct Rerr {
  std::vector<Unreachable> unreachable;
};

using Payload = std::variant<DataPacket, Rreq, Rrep, Rerr>;

struct Frame {
  FrameKind kind = FrameKind::data;
  std::uint32_t size = 0;  // bytes on air, headers included
  NodeId link_src = kNoNode;
  NodeId link_dst = kBroadcast;
  Payload payload;
  engine::SimTime enqueue_time = 0.0;

  [[nodiscard]] bool is_broadcast() const { return link_dst == kBroadcast; }
};

}  // namespace fanet
