#pragma once

// Binary persistence for complexity tables. All integers little-endian.
//   "RALK" | u32 isa | u32 l_max | u64 s_max | u32 n | u64 programs | u64 unresolved | u32 records
//   record: u8 length | u32 value (bits MSB first) | u16 entries | entries * (u8 bits, u64 steps)

#include "ral/kolmo.hpp"

#include <fstream>
#include <iterator>

namespace ral::kolmo {

namespace detail {

template <class T>
void put(std::string& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff));
}

template <class T>
T get(std::string_view in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw Error("table file is truncated");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= std::uint64_t{static_cast<unsigned char>(in[pos + i])} << (8 * i);
  pos += sizeof(T);
  return static_cast<T>(v);
}

}  // namespace detail

inline std::string serialize_table(const Table& t) {
  std::string out = "RALK";
  detail::put<std::uint32_t>(out, vm::kIsaVersion);
  detail::put<std::uint32_t>(out, t.caps.l_max);
  detail::put<std::uint64_t>(out, t.caps.s_max);
  detail::put<std::uint32_t>(out, t.caps.n);
  detail::put<std::uint64_t>(out, t.programs);
  detail::put<std::uint64_t>(out, t.unresolved);
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(t.fronts.size()));
  for (const auto& [x, f] : t.fronts) {
    detail::put<std::uint8_t>(out, static_cast<std::uint8_t>(x.size()));
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(value_of(x)));
    detail::put<std::uint16_t>(out, static_cast<std::uint16_t>(f.entries.size()));
    for (const auto& [bits, steps] : f.entries) {
      detail::put<std::uint8_t>(out, static_cast<std::uint8_t>(bits));
      detail::put<std::uint64_t>(out, steps);
    }
  }
  return out;
}

inline Table deserialize_table(std::string_view in) {
  if (in.substr(0, 4) != "RALK") throw Error("not a complexity table (bad magic)");
  std::size_t pos = 4;
  auto isa = detail::get<std::uint32_t>(in, pos);
  if (isa != vm::kIsaVersion) throw Error("table was built for ISA version " + std::to_string(isa));
  Table t;
  t.caps.l_max = detail::get<std::uint32_t>(in, pos);
  t.caps.s_max = detail::get<std::uint64_t>(in, pos);
  t.caps.n = detail::get<std::uint32_t>(in, pos);
  t.programs = detail::get<std::uint64_t>(in, pos);
  t.unresolved = detail::get<std::uint64_t>(in, pos);
  auto records = detail::get<std::uint32_t>(in, pos);
  for (std::uint32_t r = 0; r < records; ++r) {
    auto len = detail::get<std::uint8_t>(in, pos);
    auto val = detail::get<std::uint32_t>(in, pos);
    auto count = detail::get<std::uint16_t>(in, pos);
    Front f;
    for (std::uint16_t e = 0; e < count; ++e) {
      auto bits = detail::get<std::uint8_t>(in, pos);
      auto steps = detail::get<std::uint64_t>(in, pos);
      f.entries.push_back({bits, steps});
    }
    t.fronts[bits_of(val, len)] = std::move(f);
  }
  if (pos != in.size()) throw Error("trailing bytes in table file");
  return t;
}

inline void save_table(const Table& t, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  auto s = serialize_table(t);
  f.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline Table load_table(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot read " + path);
  std::string s((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return deserialize_table(s);
}

}  // namespace ral::kolmo
