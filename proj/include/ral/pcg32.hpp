#pragma once

// PCG32 (XSH-RR, 64-bit state) as published by M. O'Neill, plus the seed
// derivation helpers every sampler in the library uses.

#include <cstdint>
#include <string>
#include <string_view>

namespace ral {

class Pcg32 {
 public:
  Pcg32(std::uint64_t seed, std::uint64_t stream) : inc_((stream << 1u) | 1u) {
    next();
    state_ += seed;
    next();
  }

  std::uint32_t next() {
    std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
  }

  /// Uniform in [0, bound) by rejection (bound > 0).
  std::uint32_t below(std::uint32_t bound) {
    std::uint32_t threshold = (-bound) % bound;
    for (;;) {
      std::uint32_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  /// n uniform bits as a '0'/'1' string; bit j is bit (31 - j % 32) of word j / 32.
  std::string bits(unsigned n) {
    std::string out(n, '0');
    std::uint32_t word = 0;
    for (unsigned j = 0; j < n; ++j) {
      if (j % 32 == 0) word = next();
      if ((word >> (31 - j % 32)) & 1u) out[j] = '1';
    }
    return out;
  }

  /// Uniform value of n <= 32 bits, most significant bit drawn first.
  std::uint32_t value(unsigned n) {
    if (n == 0) return 0;
    std::uint32_t w = next();
    return n >= 32 ? w : (w >> (32 - n));
  }

 private:
  std::uint64_t state_ = 0;
  std::uint64_t inc_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of the i-th independent sample of a run seeded with `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t i) {
  return splitmix64(seed ^ splitmix64(i));
}

/// FNV-1a over 64-bit words (little-endian bytes).
class Fnv1a {
 public:
  void add(std::uint64_t word) {
    for (int b = 0; b < 8; ++b) {
      hash_ ^= (word >> (8 * b)) & 0xFFu;
      hash_ *= 0x100000001B3ULL;
    }
  }
  void add(std::string_view s) {
    for (unsigned char c : s) {
      hash_ ^= c;
      hash_ *= 0x100000001B3ULL;
    }
  }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xCBF29CE484222325ULL;
};

}  // namespace ral
