#pragma once

// GF(2^k) for 2 <= k <= 16. Elements are k-bit integers; addition is XOR.

#include "ral/error.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace ral {

using Elem = std::uint32_t;

/// Reduction polynomial for each k, including the x^k term.
inline std::uint32_t irreducible_poly(unsigned k) {
  static constexpr std::array<std::uint32_t, 17> table{0,      0,      0x7,    0xB,    0x13,   0x25,
                                                       0x43,   0x83,   0x11B,  0x211,  0x409,  0x805,
                                                       0x1009, 0x201B, 0x4021, 0x8003, 0x1002B};
  if (k < 2 || k > 16) throw Error("field bits must be in 2..16, got " + std::to_string(k));
  return table[k];
}

class Field {
 public:
  explicit Field(unsigned k) : k_(k), poly_(irreducible_poly(k)), q_(1u << k) {
    if (k_ <= 8) {
      table_ = std::make_shared<std::vector<Elem>>(std::size_t{q_} * q_);
      for (Elem a = 0; a < q_; ++a)
        for (Elem b = 0; b < q_; ++b) (*table_)[std::size_t{a} * q_ + b] = slow_mul(a, b);
    }
  }

  unsigned bits() const { return k_; }
  std::uint32_t size() const { return q_; }
  std::uint32_t modulus() const { return poly_; }

  static Elem add(Elem a, Elem b) { return a ^ b; }
  static Elem sub(Elem a, Elem b) { return a ^ b; }

  Elem mul(Elem a, Elem b) const {
    if (table_) return (*table_)[std::size_t{a} * q_ + b];
    return slow_mul(a, b);
  }

  Elem pow(Elem a, std::uint64_t e) const {
    Elem r = 1;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }

  Elem inv(Elem a) const {
    if (a == 0) throw Error("division by zero in GF(2^" + std::to_string(k_) + ")");
    return pow(a, q_ - 2);
  }

  Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }

  /// Unique square root (Frobenius is a bijection in characteristic 2).
  Elem sqrt(Elem a) const { return pow(a, q_ / 2); }

  bool contains(Elem a) const { return a < q_; }

 private:
  Elem slow_mul(Elem a, Elem b) const {
    std::uint32_t r = 0;
    while (b) {
      if (b & 1) r ^= a;
      b >>= 1;
      a <<= 1;
      if (a & q_) a ^= poly_;
    }
    return r;
  }

  unsigned k_;
  std::uint32_t poly_;
  std::uint32_t q_;
  std::shared_ptr<std::vector<Elem>> table_;
};

}  // namespace ral
