#pragma once

// Univariate polynomials over GF(2^k), coefficients lowest degree first.

#include "ral/gf2k.hpp"

namespace ral {

struct Poly1 {
  std::vector<Elem> coeffs;  ///< trailing zeros trimmed; empty is the zero polynomial

  Poly1() = default;
  explicit Poly1(std::vector<Elem> c) : coeffs(std::move(c)) { trim(); }

  void trim() {
    while (!coeffs.empty() && coeffs.back() == 0) coeffs.pop_back();
  }

  /// Degree, with -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs.size()) - 1; }

  Elem eval(const Field& F, Elem x) const {
    Elem r = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) r = Field::add(F.mul(r, x), *it);
    return r;
  }

  bool operator==(const Poly1&) const = default;
};

inline Poly1 poly_add(const Poly1& a, const Poly1& b) {
  std::vector<Elem> c(std::max(a.coeffs.size(), b.coeffs.size()), 0);
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) c[i] ^= a.coeffs[i];
  for (std::size_t i = 0; i < b.coeffs.size(); ++i) c[i] ^= b.coeffs[i];
  return Poly1(std::move(c));
}

inline Poly1 poly_mul(const Field& F, const Poly1& a, const Poly1& b) {
  if (a.coeffs.empty() || b.coeffs.empty()) return {};
  std::vector<Elem> c(a.coeffs.size() + b.coeffs.size() - 1, 0);
  for (std::size_t i = 0; i < a.coeffs.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs.size(); ++j) c[i + j] ^= F.mul(a.coeffs[i], b.coeffs[j]);
  return Poly1(std::move(c));
}

/// Lagrange interpolation through (xs[i], ys[i]) with distinct xs.
inline Poly1 interpolate(const Field& F, const std::vector<Elem>& xs, const std::vector<Elem>& ys) {
  Poly1 out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    Poly1 basis({1});
    Elem denom = 1;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      if (j == i) continue;
      basis = poly_mul(F, basis, Poly1({xs[j], 1}));  // X - x_j == X + x_j
      denom = F.mul(denom, Field::sub(xs[i], xs[j]));
    }
    Elem scale = F.div(ys[i], denom);
    for (auto& c : basis.coeffs) c = F.mul(c, scale);
    out = poly_add(out, Poly1(basis.coeffs));
  }
  return out;
}

}  // namespace ral
