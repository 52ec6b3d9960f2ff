#include <doctest.h>

#include <map>
#include <sstream>
#include <string>

#include "fanet/medium/medium.hpp"
#include "static_world.hpp"

using namespace fanet;
using namespace fanet::medium;

namespace {

struct Bench {
  engine::Simulator sim;
  std::vector<Vec3> pos;
  std::unique_ptr<Medium> medium;
  std::vector<std::pair<NodeId, engine::SimTime>> received;
  std::vector<NodeId> breaks;

  explicit Bench(std::vector<Vec3> p, MediumConfig cfg = {}) : pos(std::move(p)) {
    medium = std::make_unique<Medium>(
        sim, pos.size(), [this](NodeId id, engine::SimTime) { return pos[id]; }, cfg, engine::RngStream(1, "backoff"));
    medium->on_receive([this](NodeId r, const Frame&) { received.emplace_back(r, sim.now()); });
    medium->on_link_break([this](NodeId s, const Frame&) { breaks.push_back(s); });
  }
};

Frame data_frame(NodeId to) {
  Frame f;
  f.kind = FrameKind::data;
  f.link_dst = to;
  f.payload = DataPacket{};
  return f;
}

Frame rreq_frame() {
  Frame f;
  f.kind = FrameKind::rreq;
  f.link_dst = kBroadcast;
  f.payload = Rreq{};
  return f;
}

}  // namespace

TEST_CASE("unit-disc neighborhood") {
  const std::vector<Vec3> close{{0, 0, 0}, {249.9, 0, 0}};
  const std::vector<Vec3> far{{0, 0, 0}, {250.1, 0, 0}};
  CHECK(neighbors(0, close, 250.0) == std::vector<NodeId>{1});
  CHECK(neighbors(0, far, 250.0).empty());
}

TEST_CASE("neighborhood is symmetric") {
  engine::RngStream rng(1, "placement");
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<Vec3> p(8);
    for (auto& v : p) v = {rng.uniform(0, 600), rng.uniform(0, 600), rng.uniform(0, 300)};
    for (NodeId u = 0; u < p.size(); ++u) {
      for (NodeId v : neighbors(u, p, 250.0)) {
        const auto back = neighbors(v, p, 250.0);
        REQUIRE(std::find(back.begin(), back.end(), u) != back.end());
      }
    }
  }
}

TEST_CASE("finite transmit queue") {
  MediumConfig cfg;
  cfg.queue_capacity = 64;
  Bench b({{0, 0, 0}, {100, 0, 0}}, cfg);
  // The first frame goes straight on air, the next 64 fill the queue.
  CHECK(b.medium->enqueue(0, data_frame(1)) == EnqueueResult::accepted);
  for (int i = 0; i < 64; ++i) CHECK(b.medium->enqueue(0, data_frame(1)) == EnqueueResult::accepted);
  CHECK(b.medium->queue_length(0) == 64);
  CHECK(b.medium->enqueue(0, data_frame(1)) == EnqueueResult::dropped_overflow);
  CHECK(b.medium->counters(0).dropped_overflow == 1);
  b.sim.run_until(1.0);
  CHECK(b.received.size() == 65);
}

TEST_CASE("airtime of a data frame") {
  MediumConfig cfg;
  const auto size = cfg.frame_size(DataPacket{});
  CHECK(size == 560);
  Bench b({{0, 0, 0}, {100, 0, 0}}, cfg);
  CHECK(b.medium->airtime(size) == doctest::Approx(4480.0 / 11e6));
  b.medium->enqueue(0, data_frame(1));
  b.sim.run_until(1.0);
  REQUIRE(b.received.size() == 1);
  CHECK(b.received[0].second == doctest::Approx(4.073e-4).epsilon(1e-3));
}

TEST_CASE("broadcast reaches every neighbor at once") {
  Bench b({{0, 0, 0}, {100, 0, 0}, {0, 100, 0}, {-100, 0, 0}, {600, 0, 0}});
  b.medium->enqueue(0, rreq_frame());
  b.sim.run_until(1.0);
  REQUIRE(b.received.size() == 3);
  CHECK(b.received[0].second == b.received[1].second);
  CHECK(b.received[1].second == b.received[2].second);
}

TEST_CASE("unicast target leaving range is lost and reported") {
  Bench b({{0, 0, 0}, {200, 0, 0}});
  b.medium->enqueue(0, data_frame(1));
  b.sim.schedule(1e-4, [&] { b.pos[1] = {300, 0, 0}; });
  b.sim.run_until(1.0);
  CHECK(b.received.empty());
  CHECK(b.medium->counters(0).lost_range == 1);
  CHECK(b.breaks == std::vector<NodeId>{0});
}

TEST_CASE("carrier sense defers a neighbor") {
  Bench b({{0, 0, 0}, {100, 0, 0}, {200, 0, 0}});
  b.medium->enqueue(0, data_frame(1));
  b.medium->enqueue(2, data_frame(1));
  CHECK(b.medium->transmitting(0));
  CHECK_FALSE(b.medium->transmitting(2));
  CHECK(b.medium->counters(2).deferrals == 1);
  b.sim.run_until(1.0);
  CHECK(b.received.size() == 2);
}

TEST_CASE("serialization, airtime and conservation under load") {
  engine::RngStream rng(2, "load");
  std::vector<Vec3> p(8);
  for (auto& v : p) v = {rng.uniform(0, 400), rng.uniform(0, 400), rng.uniform(0, 100)};
  MediumConfig cfg;
  cfg.queue_capacity = 8;
  Bench b(p, cfg);
  std::ostringstream log;
  b.medium->set_event_log(&log);
  for (int i = 0; i < 3000; ++i) {
    const double t = rng.uniform(0.0, 0.2);
    const auto from = static_cast<NodeId>(rng.integer(0, 7));
    const bool bcast = rng.bernoulli(0.3);
    const auto to = static_cast<NodeId>((from + 1 + rng.integer(0, 6)) % 8);
    b.sim.schedule(t, [&b, from, to, bcast] { b.medium->enqueue(from, bcast ? rreq_frame() : data_frame(to)); });
  }
  // Stop mid-load so some frames are still in flight.
  b.sim.run_until(0.15);

  for (NodeId n = 0; n < 8; ++n) {
    const NodeCounters& c = b.medium->counters(n);
    CHECK(c.offered == c.delivered + c.dropped_overflow + c.lost_range + b.medium->in_flight(n));
    CHECK(c.airtime <= b.sim.now());
  }
  const NodeCounters t = b.medium->totals();
  std::size_t in_flight = 0;
  b.medium->for_each_in_flight([&](NodeId, const Frame&) { ++in_flight; });
  CHECK(t.offered == t.delivered + t.dropped_overflow + t.lost_range + in_flight);
  CHECK(t.dropped_overflow > 0);

  // Per node, every transmission starts after the previous one ended.
  std::map<NodeId, double> busy_until;
  std::istringstream in(log.str());
  std::string line;
  std::size_t starts = 0;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string time, node, event, kind, size;
    std::getline(row, time, ',');
    std::getline(row, node, ',');
    std::getline(row, event, ',');
    std::getline(row, kind, ',');
    std::getline(row, size, ',');
    const double at = std::stod(time);
    const auto id = static_cast<NodeId>(std::stoul(node));
    if (event == "tx_start") {
      ++starts;
      CHECK(at >= busy_until[id] - 1e-6);
      busy_until[id] = at + b.medium->airtime(static_cast<std::uint32_t>(std::stoul(size)), kind == "rreq");
    }
  }
  CHECK(starts > 100);
}

TEST_CASE("invalid configuration") {
  engine::Simulator sim;
  auto pos = [](NodeId, engine::SimTime) { return Vec3{}; };
  MediumConfig cfg;
  cfg.queue_capacity = 0;
  CHECK_THROWS_AS(Medium(sim, 2, pos, cfg, engine::RngStream(1, "b")), std::invalid_argument);
  cfg = MediumConfig{};
  cfg.range = 0.0;
  CHECK_THROWS_AS(Medium(sim, 2, pos, cfg, engine::RngStream(1, "b")), std::invalid_argument);
}
