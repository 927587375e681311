#pragma once

// Toy machine for the complexity experiments.
//
// Opcodes (3 bits, MSB first), three of which take a 4-bit operand:
//   000 OUT0   append 0            100 SETC i  counter += i + 1
//   001 OUT1   append 1            101 DECJ o  if counter > 0: counter -= 1, jump back o
//   010 DUP    output += output    110 DOUBLE  counter *= 2 (saturating)
//   011 JMP o  jump back o         111 HALT
// Jumps land on instruction max(0, i - o) where i is the jumping instruction.
// Running off the end halts for free; every executed instruction is one step.

#include "ral/bits.hpp"
#include "ral/error.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace ral::vm {

constexpr unsigned kIsaVersion = 1;

enum class OpCode : std::uint8_t { Out0 = 0, Out1 = 1, Dup = 2, Jmp = 3, SetC = 4, DecJ = 5, Double = 6, Halt = 7 };

inline bool has_operand(OpCode c) { return c == OpCode::Jmp || c == OpCode::SetC || c == OpCode::DecJ; }

struct Instr {
  OpCode op = OpCode::Halt;
  std::uint8_t arg = 0;

  unsigned bits() const { return has_operand(op) ? 7 : 3; }
  bool operator==(const Instr&) const = default;
};

using Program = std::vector<Instr>;

inline unsigned program_bits(const Program& p) {
  unsigned b = 0;
  for (const auto& i : p) b += i.bits();
  return b;
}

/// Total decoding; a trailing fragment that does not complete an instruction is dropped.
inline Program decode(std::string_view bits) {
  if (!is_bitstring(bits)) throw Error("program must be a bitstring");
  Program p;
  std::size_t i = 0;
  while (i + 3 <= bits.size()) {
    auto op = static_cast<OpCode>(value_of(bits.substr(i, 3)));
    if (!has_operand(op)) {
      p.push_back({op, 0});
      i += 3;
      continue;
    }
    if (i + 7 > bits.size()) break;
    p.push_back({op, static_cast<std::uint8_t>(value_of(bits.substr(i + 3, 4)))});
    i += 7;
  }
  return p;
}

inline std::string encode(const Program& p) {
  std::string s;
  for (const auto& i : p) {
    s += bits_of(static_cast<unsigned>(i.op), 3);
    if (has_operand(i.op)) s += bits_of(i.arg, 4);
  }
  return s;
}

/// Every distinct instruction, in encoding order.
inline const std::vector<Instr>& instruction_set() {
  static const std::vector<Instr> all = [] {
    std::vector<Instr> v;
    for (unsigned c = 0; c < 8; ++c) {
      auto op = static_cast<OpCode>(c);
      if (!has_operand(op)) v.push_back({op, 0});
      else
        for (unsigned a = 0; a < 16; ++a) v.push_back({op, static_cast<std::uint8_t>(a)});
    }
    return v;
  }();
  return all;
}

enum class Status { Halted, Running, Overflow };

inline const char* status_name(Status s) {
  switch (s) {
    case Status::Halted: return "halted";
    case Status::Running: return "running";
    case Status::Overflow: return "overflow";
  }
  return "?";
}

struct LoopMark {
  std::size_t ip;
  std::uint64_t counter;
  std::uint64_t epoch;
};

struct State {
  std::size_t ip = 0;
  std::uint64_t counter = 0;
  std::string output;
  std::uint64_t steps = 0;
  std::uint64_t epoch = 0;       ///< DECJ fall-throughs so far
  bool discard_output = false;   ///< track only output_length (halting audits)
  std::uint64_t output_length = 0;
  std::vector<LoopMark> marks;   ///< last visit of each taken backward jump
};

struct Outcome {
  Status status = Status::Running;
  bool proven_loop = false;  ///< running, and provably never halts
  bool reached_end = false;  ///< halted by running off the end (not HALT)
};

inline std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max() : a + b;
}

/// Continues `st` on `p` until it halts, reaches `step_cap`, overflows
/// `output_limit`, or is proven to loop forever.
///
/// Loop proof: control flow depends only on (ip, counter), so revisiting a
/// taken backward jump with the same counter is a cycle. Revisiting it with a
/// larger counter and no DECJ fall-through in between also repeats forever,
/// since every counter update is monotone and taken DECJs stay taken.
inline Outcome advance(const Program& p, State& st, std::uint64_t step_cap, std::size_t output_limit) {
  Outcome o;
  for (;;) {
    if (st.ip >= p.size()) {
      o.status = Status::Halted;
      o.reached_end = true;
      return o;
    }
    if (st.steps >= step_cap) {
      o.status = Status::Running;
      return o;
    }
    const Instr& in = p[st.ip];
    ++st.steps;
    bool jump = false;
    switch (in.op) {
      case OpCode::Out0:
      case OpCode::Out1:
        st.output_length = sat_add(st.output_length, 1);
        if (!st.discard_output) st.output.push_back(in.op == OpCode::Out0 ? '0' : '1');
        break;
      case OpCode::Dup:
        st.output_length = sat_add(st.output_length, st.output_length);
        if (!st.discard_output) st.output += st.output;
        break;
      case OpCode::Jmp: jump = true; break;
      case OpCode::SetC: st.counter = sat_add(st.counter, in.arg + 1u); break;
      case OpCode::DecJ:
        if (st.counter > 0 && in.arg == 0) {
          // self-loop: take the remaining iterations in one go
          --st.counter;
          std::uint64_t spin = std::min(st.counter, step_cap - st.steps);
          st.steps += spin;
          st.counter -= spin;
          continue;
        }
        if (st.counter > 0) {
          jump = true;
        } else {
          ++st.epoch;
        }
        break;
      case OpCode::Double: st.counter = sat_add(st.counter, st.counter); break;
      case OpCode::Halt: o.status = Status::Halted; return o;
    }
    if (st.output_length > output_limit) {
      o.status = Status::Overflow;
      return o;
    }
    if (jump) {
      // counter value before the DECJ decrement is what the proof compares
      bool found = false;
      for (auto& m : st.marks)
        if (m.ip == st.ip) {
          found = true;
          if (st.counter == m.counter || (st.counter > m.counter && st.epoch == m.epoch)) {
            o.status = Status::Running;
            o.proven_loop = true;
            return o;
          }
          m.counter = st.counter;
          m.epoch = st.epoch;
        }
      if (!found) st.marks.push_back({st.ip, st.counter, st.epoch});
      if (in.op == OpCode::DecJ) --st.counter;
      st.ip = st.ip >= in.arg ? st.ip - in.arg : 0;
    } else {
      ++st.ip;
    }
  }
}

struct RunResult {
  Status status = Status::Running;
  std::string output;
  std::uint64_t output_length = 0;
  std::uint64_t steps = 0;
  bool proven_loop = false;
};

inline RunResult run(const Program& p, std::uint64_t step_cap, std::size_t output_limit = std::size_t{1} << 24) {
  State st;
  auto o = advance(p, st, step_cap, output_limit);
  return {o.status, std::move(st.output), st.output_length, st.steps, o.proven_loop};
}

/// Halting behaviour only: the output is not materialized.
inline RunResult run_control(const Program& p, std::uint64_t step_cap) {
  State st;
  st.discard_output = true;
  auto o = advance(p, st, step_cap, std::numeric_limits<std::size_t>::max());
  return {o.status, {}, st.output_length, st.steps, o.proven_loop};
}

inline RunResult run_bits(std::string_view bits, std::uint64_t step_cap, std::size_t output_limit = std::size_t{1} << 24) {
  return run(decode(bits), step_cap, output_limit);
}

}  // namespace ral::vm
