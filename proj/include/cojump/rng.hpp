#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cojump {

/// Stateless 64-bit mixer (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Stable 64-bit hash of a substream tag (FNV-1a).
std::uint64_t tag_hash(std::string_view tag) noexcept;

/// Seeded random stream. Streams are derived, never shared: a path worker
/// derives `Rng(master).derive(path).derive("jumps")` and so on, so the
/// numbers a component sees depend only on its key and not on scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  Rng derive(std::uint64_t key) const;
  Rng derive(std::string_view tag) const;

  /// Uniform on [0,1).
  double uniform();
  /// Uniform on (0,1].
  double uniform_open_left();
  double normal();
  /// Exponential with the given rate (mean 1/rate).
  double exponential(double rate);
  std::uint64_t poisson(double mean);
  bool coin();
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace cojump
