#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace fanet::engine {

/// Deterministic random stream keyed by (master_seed, label). Every subsystem
/// draws from its own label so that extra draws in one place never shift the
/// sequence seen by another.
///
/// The distributions are implemented here rather than through <random>
/// distribution objects, whose output is library-specific; the byte-for-byte
/// CSV reproducibility guarantee depends on this.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::string_view label);

  [[nodiscard]] std::uint64_t master_seed() const { return master_seed_; }
  [[nodiscard]] const std::string& label() const { return label_; }
  [[nodiscard]] std::uint64_t draws() const { return draws_; }

  std::uint64_t next_u64();

  /// Uniform in [0, 1).
  double uniform();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform in (0, hi].
  double uniform_open_closed(double hi) { return hi * (1.0 - uniform()); }
  double gaussian(double mean, double sd);
  /// Uniform integer in [lo, hi], inclusive on both ends.
  std::int64_t integer(std::int64_t lo, std::int64_t hi);
  bool bernoulli(double p) { return uniform() < p; }

  /// Derives a child stream, e.g. one per node, without touching this stream's sequence.
  [[nodiscard]] RngStream fork(std::string_view sublabel) const;

 private:
  std::uint64_t master_seed_;
  std::string label_;
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
};

/// 64-bit FNV-1a over the label bytes.
std::uint64_t hash_label(std::string_view label);
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace fanet::engine
