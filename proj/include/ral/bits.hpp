#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ral {

inline bool is_bitstring(std::string_view s) {
  for (char c : s)
    if (c != '0' && c != '1') return false;
  return true;
}

/// The n-bit string of `value`, most significant bit first.
inline std::string bits_of(std::uint64_t value, unsigned n) {
  std::string s(n, '0');
  for (unsigned i = 0; i < n; ++i)
    if ((value >> (n - 1 - i)) & 1u) s[i] = '1';
  return s;
}

inline std::uint64_t value_of(std::string_view bits) {
  std::uint64_t v = 0;
  for (char c : bits) v = (v << 1) | (c == '1' ? 1u : 0u);
  return v;
}

/// All n-bit strings in increasing numeric order.
inline std::vector<std::string> all_bitstrings(unsigned n) {
  std::vector<std::string> out;
  out.reserve(std::size_t{1} << n);
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) out.push_back(bits_of(v, n));
  return out;
}

}  // namespace ral
