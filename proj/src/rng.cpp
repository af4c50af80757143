#include "krgg/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace krgg {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t cell, std::uint64_t trial,
                                 std::uint64_t purpose) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ splitmix64(cell + 0x1000193ULL));
  h = splitmix64(h ^ splitmix64(trial + 0x27D4EB2FULL));
  h = splitmix64(h ^ splitmix64(purpose + 0x165667B1ULL));
  return h;
}

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) {
    return static_cast<std::int64_t>(engine_());
  }
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % span);
}

std::int64_t RngStream::poisson(double mean) {
  std::poisson_distribution<std::int64_t> dist(mean);
  return dist(engine_);
}

double RngStream::normal() {
  double u1;
  do {
    u1 = uniform01();
  } while (u1 <= 0.0);
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace krgg
