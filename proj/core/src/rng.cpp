#include "fanet/engine/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fanet::engine {

std::uint64_t hash_label(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t master_seed, std::string_view label)
    : master_seed_(master_seed),
      label_(label),
      engine_(splitmix64(splitmix64(master_seed) ^ hash_label(label))) {}

std::uint64_t RngStream::next_u64() {
  ++draws_;
  return engine_();
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::gaussian(double mean, double sd) {
  // Box-Muller, one sample per pair so that each draw is self-contained.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  return mean + sd * z;
}

std::int64_t RngStream::integer(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw std::invalid_argument("integer range with hi < lo");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(next_u64());  // full 64-bit range
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % span);
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return lo + static_cast<std::int64_t>(x % span);
}

RngStream RngStream::fork(std::string_view sublabel) const {
  std::string child = label_;
  child += '/';
  child += sublabel;
  return RngStream(master_seed_, child);
}

}  // namespace fanet::engine
