#pragma once

// Seeded random streams. Every stream is keyed by (run seed, slot, node,
// phase) so a node's draws never depend on how many draws other nodes made.
// Conversions to doubles and bounded integers are done here rather than via
// <random> distributions, whose output is implementation defined.

#include <cstdint>
#include <random>

namespace p2ptrust {

enum class Phase : std::uint64_t {
  setup = 1,
  query = 2,
  allocate = 3,
  transact = 4,
  link = 5,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t slot, std::uint64_t node,
                                    Phase phase) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ slot);
  h = splitmix64(h ^ node);
  return splitmix64(h ^ static_cast<std::uint64_t>(phase));
}

class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  /// Uniform integer in [lo, hi].
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }

private:
  std::mt19937_64 engine_;
};

}  // namespace p2ptrust
