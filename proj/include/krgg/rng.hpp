#pragma once

#include <cstdint>
#include <random>

namespace krgg {

/// SplitMix64 finalizer; the mixing step used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for the stream identified by (master, cell, trial, purpose).
std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t cell, std::uint64_t trial,
                                 std::uint64_t purpose = 0);

/// A seeded random stream. Uniform variates are built from raw 64-bit draws so
/// that sequences do not depend on the standard library's distribution code.
class RngStream {
 public:
  using result_type = std::mt19937_64::result_type;

  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  std::int64_t poisson(double mean);
  /// Standard normal via Box-Muller.
  double normal();

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace krgg
