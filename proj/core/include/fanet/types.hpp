#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace fanet {

using NodeId = std::uint32_t;
inline constexpr NodeId kBroadcast = std::numeric_limits<NodeId>::max();
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max() - 1;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(Vec3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double distance_squared(Vec3 a, Vec3 b) {
  const Vec3 d = a - b;
  return d.x * d.x + d.y * d.y + d.z * d.z;
}

inline double distance(Vec3 a, Vec3 b) { return std::sqrt(distance_squared(a, b)); }

}  // namespace fanet
