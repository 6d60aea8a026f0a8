#pragma once

// Deterministic random source. std::mt19937_64 output is pinned by the
// standard, but std::uniform_int_distribution is not, so the bounded draws
// here are hand-rolled to keep runs byte-identical across platforms.

#include <cstdint>
#include <random>

namespace swarmform {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, n) via rejection sampling; n must be positive.
  std::uint64_t bounded(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  // Uniform double in [0, 1) with 53 random bits.
  double unit_real() { return double(next() >> 11) * 0x1.0p-53; }

  // Uniform double in [lo, hi).
  double range_real(double lo, double hi) { return lo + (hi - lo) * unit_real(); }

 private:
  std::mt19937_64 engine_;
};

// Decorrelated per-run stream: run i of a batch seeded with `base`.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(base ^ splitmix64(index + 1));
}

}  // namespace swarmform
