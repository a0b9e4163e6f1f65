#pragma once

#include <array>
#include <cstdint>

namespace gptx {

// All randomized pieces of the library (tree generation, trace generation,
// evaluation) draw from this generator so that a seed reproduces the same
// corpus and the same CSV bytes on every platform. std::mt19937 plus the
// standard distributions would not give that guarantee, so we pin the
// algorithms here: splitmix64 for seeding/stream derivation and
// xoshiro256** for the stream itself.

inline uint64_t splitmix64_next(uint64_t& state) noexcept {
  uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(uint64_t seed) noexcept {
    uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64_next(sm);
  }

  // xoshiro256** step.
  uint64_t next() noexcept {
    const uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 bits of mantissa.
  double uniform01() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n). Plain modulo; the bias is negligible for the small
  // ranges used here and the reduction is identical everywhere.
  uint64_t below(uint64_t n) noexcept { return next() % n; }

  // Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi) noexcept {
    return lo + static_cast<int>(below(static_cast<uint64_t>(hi - lo + 1)));
  }

  bool bernoulli(double p) noexcept { return uniform01() < p; }

  // Deterministic per-item stream derivation (tree i of a corpus, etc).
  static uint64_t derive(uint64_t seed, uint64_t index) noexcept {
    uint64_t st = seed + 0x9E3779B97F4A7C15ull * (index + 1);
    return splitmix64_next(st);
  }

 private:
  static uint64_t rotl(uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

  std::array<uint64_t, 4> state_{};
};

}  // namespace gptx
