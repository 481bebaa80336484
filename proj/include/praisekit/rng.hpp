#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace praisekit {

// All sampling in this library goes through one explicitly specified
// generator so that shuffles, subsets and recombinations are reproducible
// across implementations and platforms.
//
// Stream   : xoshiro256** 1.0 (Blackman & Vigna, 2018), public domain
//            reference constants. next() returns rotl(s1 * 5, 7) * 9 and
//            updates state with the shift/rotate sequence (17, 45).
// Seeding  : the 64-bit seed is expanded to the 256-bit state with four
//            successive outputs of splitmix64 (constant 0x9E3779B97F4A7C15,
//            mix constants 0xBF58476D1CE4E5B9 / 0x94D049BB133111EB).
// Bounded  : bounded(n) uses rejection sampling on the raw 64-bit output
//            (draw x, r = x % n, reject while x - r > UINT64_MAX - (n-1)),
//            which is unbiased for every n.
// Doubles  : next_double() takes the top 53 bits, i.e. (x >> 11) * 2^-53,
//            uniform in [0, 1).
// Shuffle  : Fisher-Yates, highest index first: for i = n-1 .. 1 swap
//            v[i] with v[bounded(i + 1)].

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Unbiased draw from [0, n). n must be > 0.
  std::uint64_t bounded(std::uint64_t n) {
    std::uint64_t x = next();
    std::uint64_t r = x % n;
    while (x - r > UINT64_MAX - (n - 1)) {
      x = next();
      r = x % n;
    }
    return r;
  }

  /// Uniform in [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(bounded(i));
      using std::swap;
      swap(v[i - 1], v[j]);
    }
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

/// FNV-1a 64-bit hash; used to derive per-record seed streams and to
/// fingerprint configs. Offset basis 0xCBF29CE484222325, prime 0x100000001B3.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Stable derived seed for a named substream of a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) {
  std::uint64_t s = master ^ fnv1a64(tag);
  return splitmix64(s);
}

}  // namespace praisekit
