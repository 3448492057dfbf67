#pragma once

#include <cstdint>

namespace cascade {

// splitmix64 finalizer step. Used both to mix trial seeds and to expand a
// 64-bit seed into xoshiro state.
struct SplitMix64 {
  uint64_t state;
  explicit SplitMix64(uint64_t seed) : state(seed) {}
  uint64_t next() {
    uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

// Stateless mix of (master_seed, trial_index) -> per-trial seed. This mapping
// is part of the reproducibility contract: changing it changes every golden
// output.
inline uint64_t trial_seed(uint64_t master_seed, uint64_t trial_index) {
  return master_seed + 0x9E3779B97F4A7C15ULL * (trial_index + 1);
}

// xoshiro256++. One instance per trial; draws are consumed in a fixed order
// (one for the world state, then per step: revealer indicator, then signal).
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(uint64_t seed) {
    SplitMix64 sm(seed);
    s_[0] = sm.next();
    s_[1] = sm.next();
    s_[2] = sm.next();
    s_[3] = sm.next();
  }

  uint64_t next() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  uint64_t s_[4];
};

// Bernoulli(p) as a u64 threshold: draw < threshold. p >= 1 always fires.
inline uint64_t bernoulli_threshold(double p) {
  if (p >= 1.0) return UINT64_MAX;
  if (p <= 0.0) return 0;
  return static_cast<uint64_t>(p * 18446744073709551616.0);  // p * 2^64
}

inline bool bernoulli(uint64_t draw, uint64_t threshold) {
  return threshold == UINT64_MAX || draw < threshold;
}

}  // namespace cascade
