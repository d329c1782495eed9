#pragma once

#include <cstdint>
#include <random>

// Seeded deterministic randomness. std::mt19937_64 output is specified
// bit-for-bit by the standard; the distribution helpers below are hand-rolled
// because std::uniform_*_distribution is not bit-portable across library
// implementations. Every stochastic code path takes one of these generators
// explicitly — there is no hidden global stream.

namespace ionweave {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n) by rejection (exact, portable).
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % n;
  }

  // Derive an independent child stream (for per-candidate reproducibility).
  Rng spawn() { return Rng(gen_() ^ 0x9e3779b97f4a7c15ULL); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace ionweave
