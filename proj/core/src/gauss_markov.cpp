#include "fanet/mobility/gauss_markov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace fanet::mobility {
namespace {

constexpr double kPi = std::numbers::pi;

double memory_update(double value, double mean, double alpha, double sd, engine::RngStream& rng) {
  const double noise_scale = std::sqrt(std::max(0.0, 1.0 - alpha * alpha));
  // Always draw, so the stream position does not depend on alpha.
  const double noise = rng.gaussian(0.0, sd);
  return alpha * value + (1.0 - alpha) * mean + noise_scale * noise;
}

// Mirrors `v` into [lo, hi]; returns true if a reflection happened.
bool reflect(double& v, double lo, double hi) {
  bool reflected = false;
  for (int i = 0; i < 4 && (v < lo || v > hi); ++i) {
    v = v < lo ? 2.0 * lo - v : 2.0 * hi - v;
    reflected = true;
  }
  v = std::clamp(v, lo, hi);
  return reflected;
}

}  // namespace

MobilityState gmm_step(const MobilityState& state, const MobilityConfig& cfg, engine::RngStream& rng) {
  MobilityState next = state;
  const double a = state.alpha;
  next.speed = std::max(0.0, memory_update(state.speed, state.mean_speed, a, cfg.speed_sd, rng));
  next.direction = memory_update(state.direction, state.mean_direction, a, cfg.direction_sd, rng);
  next.pitch = std::clamp(memory_update(state.pitch, state.mean_pitch, a, cfg.pitch_sd, rng),
                          -kPi / 2.0, kPi / 2.0);

  const double dist = next.speed * cfg.step_interval;
  const double horizontal = dist * std::cos(next.pitch);
  next.position.x += horizontal * std::cos(next.direction);
  next.position.y += horizontal * std::sin(next.direction);
  next.position.z += dist * std::sin(next.pitch);

  const Box& b = cfg.bounds;
  if (reflect(next.position.x, b.lo.x, b.hi.x)) {
    next.direction = kPi - next.direction;
    next.mean_direction = kPi - next.mean_direction;
  }
  if (reflect(next.position.y, b.lo.y, b.hi.y)) {
    next.direction = -next.direction;
    next.mean_direction = -next.mean_direction;
  }
  if (reflect(next.position.z, b.lo.z, b.hi.z)) {
    next.pitch = -next.pitch;
    next.mean_pitch = -next.mean_pitch;
  }
  return next;
}

namespace {

// Representative of `angle` closest to `reference`, so the memory update
// never turns the long way round.
double nearest_angle(double angle, double reference) {
  const double turns = std::round((reference - angle) / (2.0 * kPi));
  return angle + 2.0 * kPi * turns;
}

double loiter_omega(const MobilityConfig& cfg) {
  return cfg.loiter_radius > 0.0 ? cfg.mean_speed / cfg.loiter_radius : 0.0;
}

}  // namespace

double orbit_rate(const MobilityConfig& cfg) {
  double ref = cfg.orbit_reference_radius;
  if (ref <= 0.0) ref = 2.0 * cfg.deploy_radius / 3.0;
  return ref > 0.0 ? cfg.mean_speed / ref : 0.0;
}

Vec3 loiter_offset(const MobilityConfig& cfg, engine::SimTime t) {
  const double phase = loiter_omega(cfg) * t;
  return {cfg.loiter_radius * std::cos(phase), cfg.loiter_radius * std::sin(phase), 0.0};
}

void apply_heading_policy(MobilityState& state, const MobilityConfig& cfg, engine::SimTime t) {
  switch (cfg.heading_policy) {
    case HeadingPolicy::own_heading:
      return;
    case HeadingPolicy::home_tether: {
      if (cfg.tether_radius <= 0.0) return;
      const double dx = cfg.home.x - state.position.x;
      const double dy = cfg.home.y - state.position.y;
      if (std::hypot(dx, dy) <= cfg.tether_radius) return;
      state.mean_direction = nearest_angle(std::atan2(dy, dx), state.direction);
      return;
    }
    case HeadingPolicy::formation_loiter: {
      const double phase = loiter_omega(cfg) * t;
      const Vec3 target = state.anchor + loiter_offset(cfg, t);
      Vec3 w{-cfg.mean_speed * std::sin(phase), cfg.mean_speed * std::cos(phase), 0.0};
      if (cfg.loiter_radius <= 0.0) w = {0.0, 0.0, 0.0};
      w = w + (target - state.position) * cfg.cohesion_gain;
      const double horizontal = std::hypot(w.x, w.y);
      if (horizontal > 0.0) state.mean_direction = nearest_angle(std::atan2(w.y, w.x), state.direction);
      state.mean_pitch = std::atan2(w.z, horizontal);
      state.mean_speed = std::clamp(std::hypot(horizontal, w.z), 0.5 * cfg.mean_speed, 1.5 * cfg.mean_speed);
      return;
    }
    case HeadingPolicy::gbs_orbit: {
      const double dx = state.position.x - cfg.home.x;
      const double dy = state.position.y - cfg.home.y;
      const double r = std::hypot(dx, dy);
      const double radius = state.anchor.x;
      const double omega = orbit_rate(cfg);
      // Lead the tangent by the lag the memory update builds up on a turn of
      // constant rate, then steer back toward the orbit radius.
      const double lead = state.alpha < 1.0 ? omega * cfg.step_interval * state.alpha / (1.0 - state.alpha) : 0.0;
      const double v = std::max(omega * radius, 1.0);
      const double correction = std::clamp(cfg.cohesion_gain * (r - radius) / v, -0.8, 0.8);
      const double tangent = std::atan2(dy, dx) + kPi / 2.0 + omega * cfg.step_interval;
      state.mean_direction = nearest_angle(tangent + lead + correction, state.direction);
      state.mean_pitch = std::clamp(cfg.cohesion_gain * (state.anchor.z - state.position.z) / v, -0.3, 0.3);
      state.mean_speed = omega * radius;
      return;
    }
  }
}

std::vector<MobilityState> place_nodes(std::size_t n, const MobilityConfig& cfg, engine::RngStream& rng) {
  if (n == 0) throw std::invalid_argument("place_nodes: node count must be positive");
  std::vector<MobilityState> out;
  out.reserve(n);
  const Box& b = cfg.bounds;
  for (std::size_t i = 0; i < n; ++i) {
    MobilityState s;
    if (cfg.deploy_radius > 0.0) {
      // Uniform over the disc, clipped to the bounds by rejection.
      do {
        const double r = cfg.deploy_radius * std::sqrt(rng.uniform());
        const double theta = rng.uniform(0.0, 2.0 * kPi);
        s.position.x = cfg.home.x + r * std::cos(theta);
        s.position.y = cfg.home.y + r * std::sin(theta);
      } while (s.position.x < b.lo.x || s.position.x > b.hi.x || s.position.y < b.lo.y ||
               s.position.y > b.hi.y);
    } else {
      s.position.x = rng.uniform(b.lo.x, b.hi.x);
      s.position.y = rng.uniform(b.lo.y, b.hi.y);
    }
    s.position.z = rng.uniform(b.lo.z, b.hi.z);
    s.direction = rng.uniform(0.0, 2.0 * kPi);
    if (cfg.heading_policy == HeadingPolicy::formation_loiter) {
      s.direction = cfg.loiter_radius > 0.0 ? kPi / 2.0 : s.direction;
      s.anchor = s.position - loiter_offset(cfg, 0.0);
    }
    if (cfg.heading_policy == HeadingPolicy::gbs_orbit) {
      const double dx = s.position.x - cfg.home.x;
      const double dy = s.position.y - cfg.home.y;
      s.anchor = {std::hypot(dx, dy), 0.0, s.position.z};
      s.direction = std::atan2(dy, dx) + kPi / 2.0;
    }
    s.mean_speed = cfg.heading_policy == HeadingPolicy::gbs_orbit ? orbit_rate(cfg) * s.anchor.x : cfg.mean_speed;
    s.speed = s.mean_speed;
    s.pitch = 0.0;
    s.mean_direction = s.direction;
    s.mean_pitch = 0.0;
    s.alpha = cfg.alpha;
    out.push_back(s);
  }
  return out;
}

Vec3 place_gbs(const Box& bounds) {
  const Vec3 c = bounds.center();
  return {c.x, c.y, bounds.lo.z};
}

Fleet::Fleet(std::vector<MobilityState> uavs, Vec3 gbs, MobilityConfig cfg, engine::RngStream rng)
    : cfg_(std::move(cfg)), rng_(std::move(rng)), gbs_(gbs), current_(std::move(uavs)) {
  if (cfg_.step_interval <= 0.0) throw std::invalid_argument("step_interval must be positive");
  next_.resize(current_.size());
  for (std::size_t i = 0; i < current_.size(); ++i) {
    apply_heading_policy(current_[i], cfg_, window_start_ + cfg_.step_interval);
    next_[i] = gmm_step(current_[i], cfg_, rng_);
  }
}

Vec3 Fleet::position(NodeId node, engine::SimTime t) const {
  if (node >= current_.size()) {
    if (node == gbs_id()) return gbs_;
    throw std::out_of_range("Fleet::position: unknown node");
  }
  const double f = std::clamp((t - window_start_) / cfg_.step_interval, 0.0, 1.0);
  const Vec3 a = current_[node].position;
  const Vec3 b = next_[node].position;
  return a + (b - a) * f;
}

const std::vector<Vec3>& Fleet::positions(engine::SimTime t) const {
  if (t != cached_time_ || cached_positions_.size() != size()) {
    cached_positions_.resize(size());
    const double f = std::clamp((t - window_start_) / cfg_.step_interval, 0.0, 1.0);
    for (std::size_t i = 0; i < current_.size(); ++i) {
      const Vec3 a = current_[i].position;
      cached_positions_[i] = a + (next_[i].position - a) * f;
    }
    cached_positions_.back() = gbs_;
    cached_time_ = t;
  }
  return cached_positions_;
}

void Fleet::advance() {
  window_start_ += cfg_.step_interval;
  current_.swap(next_);
  for (std::size_t i = 0; i < current_.size(); ++i) {
    apply_heading_policy(current_[i], cfg_, window_start_ + cfg_.step_interval);
    next_[i] = gmm_step(current_[i], cfg_, rng_);
  }
  cached_time_ = -1.0;
  if (trajectory_ != nullptr) write_trajectory(window_start_);
}

void Fleet::attach(engine::Simulator& sim, engine::SimTime t_end) {
  if (trajectory_ != nullptr) write_trajectory(window_start_);
  // Steps are scheduled one at a time to keep the queue small.
  struct Stepper {
    Fleet* fleet;
    engine::Simulator* sim;
    engine::SimTime t_end;
    void operator()() const {
      fleet->advance();
      const engine::SimTime next = fleet->window_start_ + fleet->cfg_.step_interval;
      if (next <= t_end) sim->schedule(next, *this, engine::EventKind::mobility_step);
    }
  };
  const engine::SimTime first = window_start_ + cfg_.step_interval;
  if (first <= t_end) sim.schedule(first, Stepper{this, &sim, t_end}, engine::EventKind::mobility_step);
}

void Fleet::write_trajectory(engine::SimTime t) const {
  for (std::size_t i = 0; i < current_.size(); ++i) {
    const Vec3 p = current_[i].position;
    *trajectory_ << t << ',' << i << ',' << p.x << ',' << p.y << ',' << p.z << '\n';
  }
  *trajectory_ << t << ',' << gbs_id() << ',' << gbs_.x << ',' << gbs_.y << ',' << gbs_.z << '\n';
}

}  // namespace fanet::mobility
