#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "fanet/engine/rng.hpp"
#include "fanet/engine/simulator.hpp"
#include "fanet/types.hpp"

namespace fanet::mobility {

struct Box {
  Vec3 lo{0.0, 0.0, 0.0};
  Vec3 hi{12000.0, 12000.0, 300.0};

  [[nodiscard]] bool contains(Vec3 p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z && p.z <= hi.z;
  }
  [[nodiscard]] Vec3 center() const {
    return {(lo.x + hi.x) / 2.0, (lo.y + hi.y) / 2.0, (lo.z + hi.z) / 2.0};
  }
};

struct MobilityState {
  Vec3 position;
  double speed = 0.0;      // m/s
  double direction = 0.0;  // azimuth, rad
  double pitch = 0.0;      // elevation, rad
  double mean_speed = 0.0;
  double mean_direction = 0.0;
  double mean_pitch = 0.0;
  double alpha = 0.0;
  /// Station point (formation_loiter) or orbit radius and altitude in x, z
  /// (gbs_orbit), fixed at placement.
  Vec3 anchor;
};

/// How the long-run mean heading of each UAV is chosen between steps.
enum class HeadingPolicy {
  /// Mean heading stays at the initial heading (mirrored on reflection).
  own_heading,
  /// Once a UAV is farther than tether_radius (horizontally) from home, its mean
  /// heading is turned toward home. Edge treatment of the classic 2D model,
  /// applied to a mission disc around the ground station.
  home_tether,
  /// Every UAV loiters in phase on a circle of loiter_radius around its own
  /// station point, so the formation as a whole circles the ground station.
  /// The mean velocity is the loiter velocity plus cohesion_gain times the
  /// offset from the node's current loiter point.
  formation_loiter,
  /// The swarm rotates about the ground station like a rigid disc: every UAV
  /// keeps its initial horizontal distance r and altitude and circles at the
  /// common angular rate mean_speed / orbit_reference_radius, so its mean
  /// speed is proportional to r and the fleet average equals mean_speed when
  /// the reference radius is the mean distance.
  gbs_orbit,
};

struct MobilityConfig {
  double alpha = 0.25;
  double mean_speed = 100.0;
  double step_interval = 1.0;
  double speed_sd = 20.0;
  double direction_sd = 0.3;
  double pitch_sd = 0.05;
  Box bounds;

  HeadingPolicy heading_policy = HeadingPolicy::own_heading;
  Vec3 home{6000.0, 6000.0, 0.0};
  double tether_radius = 0.0;
  /// Horizontal radius around home used for initial placement; 0 places
  /// uniformly over the whole bounds.
  double deploy_radius = 0.0;
  double loiter_radius = 400.0;  // m
  double cohesion_gain = 0.02;   // 1/s
  /// 0 selects two thirds of deploy_radius, the mean distance of a uniform disc.
  double orbit_reference_radius = 0.0;  // m
};

/// One Gauss-Markov update of speed, direction and pitch followed by a
/// position advance with reflection at the bounds. Pure given the rng state.
MobilityState gmm_step(const MobilityState& state, const MobilityConfig& cfg, engine::RngStream& rng);

/// Updates the mean values according to cfg.heading_policy for the step
/// that ends at time t.
void apply_heading_policy(MobilityState& state, const MobilityConfig& cfg, engine::SimTime t = 0.0);

/// Angular rate of gbs_orbit, rad/s.
double orbit_rate(const MobilityConfig& cfg);

/// Offset of the loiter circle at time t, relative to a station point.
Vec3 loiter_offset(const MobilityConfig& cfg, engine::SimTime t);

/// Initial UAV states: position uniform (within the deploy disc when set),
/// heading uniform in [0, 2pi) (the loiter heading under formation_loiter),
/// speed = mean speed, level flight.
std::vector<MobilityState> place_nodes(std::size_t n, const MobilityConfig& cfg, engine::RngStream& rng);

/// The ground station sits at the horizontal center of the area, on the ground.
Vec3 place_gbs(const Box& bounds);

/// All node trajectories of one run. UAVs are ids [0, uav_count), the ground
/// station is the last id. Positions between steps are linearly interpolated.
class Fleet {
 public:
  Fleet(std::vector<MobilityState> uavs, Vec3 gbs, MobilityConfig cfg, engine::RngStream rng);

  [[nodiscard]] std::size_t size() const { return current_.size() + 1; }
  [[nodiscard]] std::size_t uav_count() const { return current_.size(); }
  [[nodiscard]] NodeId gbs_id() const { return static_cast<NodeId>(current_.size()); }
  [[nodiscard]] const MobilityConfig& config() const { return cfg_; }

  [[nodiscard]] Vec3 position(NodeId node, engine::SimTime t) const;
  /// Positions of every node at t; the returned span is valid until the next call.
  const std::vector<Vec3>& positions(engine::SimTime t) const;
  [[nodiscard]] const MobilityState& state(NodeId uav) const { return current_.at(uav); }

  /// Moves the step window forward by one interval. Called by the engine once
  /// per step_interval; the ground station is never stepped.
  void advance();

  /// Schedules advance() every step_interval until t_end.
  void attach(engine::Simulator& sim, engine::SimTime t_end);

  void set_trajectory_sink(std::ostream* out) { trajectory_ = out; }

 private:
  void write_trajectory(engine::SimTime t) const;

  MobilityConfig cfg_;
  engine::RngStream rng_;
  Vec3 gbs_;
  std::vector<MobilityState> current_;  // state at window_start_
  std::vector<MobilityState> next_;     // state at window_start_ + step_interval
  engine::SimTime window_start_ = 0.0;
  std::ostream* trajectory_ = nullptr;

  mutable engine::SimTime cached_time_ = -1.0;
  mutable std::vector<Vec3> cached_positions_;
};

}  // namespace fanet::mobility
