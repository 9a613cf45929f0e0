#pragma once

#include <cstdint>
#include <limits>

namespace driftmc {

// SplitMix64 step function (Steele/Lea/Flood; Vigna's fixed-increment form).
// Used for seeding and for stateless per-key hashing.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Stateless mix of (key, index): two SplitMix64 rounds over the combined word.
// All deterministic per-site / per-stream derivations in the library go
// through this function.
inline std::uint64_t hash_mix(std::uint64_t key, std::uint64_t index) {
  std::uint64_t s = key ^ (0x9E3779B97F4A7C15ULL * (index + 1));
  std::uint64_t a = splitmix64_next(s);
  return splitmix64_next(s) ^ a;
}

// Uniform double in [0, 1) with 53 random bits.
inline double u64_to_unit_double(std::uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// xoshiro256++ (Blackman/Vigna). Small state, passes BigCrush, cheap to
// seed from SplitMix64. Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64_next(sm);
  }

  // Documented stream splitting: stream k of a master seed is an Rng seeded
  // with hash_mix(master, k). Streams with distinct k never share state.
  static Rng substream(std::uint64_t master, std::uint64_t stream) {
    return Rng(hash_mix(master, stream));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // [0, 1)
  double next_double() { return u64_to_unit_double(next_u64()); }

  // (0, 1); safe as log() argument
  double next_open() {
    double u;
    do {
      u = next_double();
    } while (u == 0.0);
    return u;
  }

  bool bernoulli(double p) { return next_double() < p; }

  // Unbiased integer in [0, n); Lemire-style rejection on the top bits.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  std::uint64_t operator()() { return next_u64(); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() {
    return std::numeric_limits<std::uint64_t>::max();
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
};

}  // namespace driftmc
