#include "ral/kolmo_io.hpp"

#include <cstdio>
#include <gtest/gtest.h>

using namespace ral;
using namespace ral::kolmo;

namespace {

// Plain step-by-step interpreter: no loop detection, no acceleration.
struct RefResult {
  bool halted = false;
  bool overflow = false;
  std::string output;
  std::uint64_t steps = 0;
};

RefResult reference_run(const vm::Program& p, std::uint64_t cap, std::size_t limit) {
  RefResult r;
  std::size_t ip = 0;
  std::uint64_t counter = 0;
  while (true) {
    if (ip >= p.size()) {
      r.halted = true;
      return r;
    }
    if (r.steps >= cap) return r;
    ++r.steps;
    const auto& in = p[ip];
    auto back = [&] { ip = ip >= in.arg ? ip - in.arg : 0; };
    switch (in.op) {
      case vm::OpCode::Out0: r.output += '0'; ++ip; break;
      case vm::OpCode::Out1: r.output += '1'; ++ip; break;
      case vm::OpCode::Dup: r.output += r.output; ++ip; break;
      case vm::OpCode::Jmp: back(); break;
      case vm::OpCode::SetC: counter = vm::sat_add(counter, in.arg + 1u); ++ip; break;
      case vm::OpCode::DecJ:
        if (counter > 0) {
          --counter;
          back();
        } else {
          ++ip;
        }
        break;
      case vm::OpCode::Double: counter = vm::sat_add(counter, counter); ++ip; break;
      case vm::OpCode::Halt: r.halted = true; return r;
    }
    if (r.output.size() > limit) {
      r.overflow = true;
      return r;
    }
  }
}

const Table& table8() {
  static const Table t = build_table(Caps::defaults(8));
  return t;
}

}  // namespace

TEST(Vm, Examples) {
  auto e = vm::run({}, 10);
  EXPECT_EQ(e.status, vm::Status::Halted);
  EXPECT_EQ(e.output, "");
  EXPECT_EQ(e.steps, 0u);

  auto r = vm::run_bits("001010111", 10);
  EXPECT_EQ(r.status, vm::Status::Halted);
  EXPECT_EQ(r.output, "11");
  EXPECT_EQ(r.steps, 3u);

  for (std::uint64_t cap : {0ull, 1ull, 7ull, 1000000ull}) {
    auto j = vm::run_bits("0110000", cap);
    EXPECT_EQ(j.status, vm::Status::Running) << cap;
  }
  EXPECT_TRUE(vm::run_bits("0110000", 100).proven_loop);
}

TEST(Vm, CountedLoop) {
  // SETC 2 (counter 3); OUT1; DECJ 1  ->  four 1s
  auto r = vm::run_bits("1000010" "001" "1010001", 100);
  EXPECT_EQ(r.status, vm::Status::Halted);
  EXPECT_EQ(r.output, "1111");
  EXPECT_EQ(r.steps, 9u);
}

TEST(Vm, DecodeEncode) {
  EXPECT_EQ(vm::instruction_set().size(), 53u);
  Pcg32 rng(7, 7);
  for (int i = 0; i < 500; ++i) {
    std::string bits = rng.bits(1 + rng.below(40));
    auto p = vm::decode(bits);
    std::string enc = vm::encode(p);
    EXPECT_EQ(bits.compare(0, enc.size(), enc), 0);
    EXPECT_LT(bits.size() - enc.size(), 7u);
    EXPECT_EQ(vm::decode(enc), p);
  }
  EXPECT_THROW(vm::decode("01x"), Error);
  EXPECT_TRUE(vm::decode("01").empty());
}

TEST(Vm, AgreesWithReferenceInterpreter) {
  Pcg32 rng(11, 3);
  int halted = 0, proven = 0;
  for (int i = 0; i < 20000; ++i) {
    auto p = vm::decode(rng.bits(3 + rng.below(40)));
    auto fast = vm::run(p, 3000, 512);
    auto ref = reference_run(p, fast.proven_loop ? 30000 : 3000, 512);
    if (fast.proven_loop) {
      ++proven;
      EXPECT_FALSE(ref.halted) << vm::encode(p);
      continue;
    }
    switch (fast.status) {
      case vm::Status::Halted:
        ++halted;
        ASSERT_TRUE(ref.halted) << vm::encode(p);
        EXPECT_EQ(ref.output, fast.output);
        EXPECT_EQ(ref.steps, fast.steps);
        break;
      case vm::Status::Overflow: EXPECT_TRUE(ref.overflow) << vm::encode(p); break;
      case vm::Status::Running: EXPECT_FALSE(ref.halted || ref.overflow) << vm::encode(p); break;
    }
  }
  EXPECT_GT(halted, 1000);
  EXPECT_GT(proven, 100);
}

TEST(Vm, ControlRunMatchesFullRun) {
  Pcg32 rng(5, 9);
  for (int i = 0; i < 3000; ++i) {
    auto p = vm::decode(rng.bits(3 + rng.below(30)));
    auto a = vm::run(p, 5000, std::size_t{1} << 20);
    if (a.status == vm::Status::Overflow) continue;
    auto b = vm::run_control(p, 5000);
    EXPECT_EQ(a.status, b.status);
    EXPECT_EQ(a.steps, b.steps);
    EXPECT_EQ(a.output.size(), b.output_length);
  }
}

TEST(Kolmo, TableMatchesBruteForce) {
  Caps caps{6, 14, 1000};
  Table t = build_table(caps);
  EXPECT_TRUE(t.exact_under_caps());
  std::map<std::string, Front> brute;
  for (unsigned len = 0; len <= caps.l_max; ++len)
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << len); ++v) {
      std::string bits = bits_of(v, len);
      auto p = vm::decode(bits);
      if (vm::encode(p) != bits) continue;
      auto r = vm::run(p, caps.s_max, 64);
      if (r.status == vm::Status::Halted && r.output.size() <= caps.n) brute[r.output].add(len, r.steps);
    }
  EXPECT_EQ(brute.size(), t.fronts.size());
  for (const auto& [x, f] : brute) {
    ASSERT_NE(t.front(x), nullptr) << x;
    EXPECT_EQ(t.front(x)->entries, f.entries) << x;
  }
}

TEST(Kolmo, Examples) {
  const Table& t = table8();
  EXPECT_EQ(t.k_final(""), 0u);
  EXPECT_EQ(t.k_t("", 0), 0u);
  auto k11 = k_t_search("11", 10, 12);
  ASSERT_TRUE(k11);
  EXPECT_LE(*k11, 9u);
  EXPECT_EQ(t.k_t("11", 10), k11);
  EXPECT_FALSE(k_t_search("0", 0, 24));
  EXPECT_FALSE(t.k_t("0", 0));
}

TEST(Kolmo, SearchAgreesWithTable) {
  const Table& t = table8();
  for (const auto& x : strings_upto(4))
    for (std::uint64_t time : {1ull, 4ull, 12ull, 100ull})
      EXPECT_EQ(k_t_search(x, time, 24), t.k_t(x, time)) << x << " " << time;
}

TEST(Kolmo, FinalBoundAndMonotonicity) {
  const Table& t = table8();
  EXPECT_TRUE(t.exact_under_caps());
  for (const auto& x : strings_upto(8)) {
    auto k = t.k_final(x);
    ASSERT_TRUE(k) << x;
    EXPECT_LE(*k, 3 * x.size()) << x;
    auto prev = t.k_t(x, 0);
    for (std::uint64_t time : {1ull, 2ull, 5ull, 10ull, 20ull, 100ull, 100000ull}) {
      auto cur = t.k_t(x, time);
      if (prev) {
        ASSERT_TRUE(cur);
        EXPECT_LE(*cur, *prev);
      }
      prev = cur;
    }
  }
  Table small = build_table({8, 18, 100000});
  for (const auto& x : strings_upto(8)) {
    auto a = small.k_final(x);
    if (a) {
      EXPECT_LE(*t.k_final(x), *a) << x;
    }
  }
}

TEST(Kolmo, LongRunCompresses) {
  auto k = k_t_search(std::string(64, '0'), 10000, 21);
  ASSERT_TRUE(k);
  EXPECT_LE(*k, 21u);
  EXPECT_EQ(vm::run(vm::decode("000" "010" "010" "010" "010" "010" "010"), 100).output, std::string(64, '0'));
}

TEST(Kolmo, CountingBound) {
  const Table& t = table8();
  auto c0 = counting_check(t, 8, 0);
  EXPECT_TRUE(c0.holds);
  EXPECT_LT(c0.fraction, Rational(1));
  auto c3 = counting_check(t, 8, 3);
  EXPECT_TRUE(c3.holds);
  EXPECT_LE(c3.fraction, Rational(1, 8));
  for (unsigned n = 0; n <= 8; ++n)
    for (unsigned c = 0; c <= n; ++c) EXPECT_TRUE(counting_check(t, n, c).holds) << n << " " << c;
}

TEST(Kolmo, SampleAxiom) {
  const Table& t = table8();
  for (std::uint64_t s = 0; s < 200; ++s) {
    auto a = sample_axiom(t, 8, 8, s);
    EXPECT_TRUE(a.valid);
    EXPECT_EQ(a.x.size(), 8u);
    EXPECT_EQ(a.x, sample_axiom(t, 8, 8, s).x);
  }
  auto exact = counting_check(t, 8, 2).fraction;
  const int samples = 4000;
  int invalid = 0;
  for (int s = 0; s < samples; ++s) invalid += !sample_axiom(t, 8, 2, derive_seed(1, s)).valid;
  double p = exact.convert_to<double>();
  double sd = std::sqrt(p * (1 - p) / samples);
  EXPECT_NEAR(invalid / double(samples), p, 3 * sd + 1e-12);
}

TEST(Kolmo, SettlingTimes) {
  const Table& t = table8();
  const std::uint64_t expected[] = {0, 1, 2, 3, 4, 5, 6, 14, 16};
  for (unsigned n = 0; n <= 8; ++n) {
    auto r = compute_Tn(t, n);
    EXPECT_EQ(r.t_n, expected[n]) << n;
    EXPECT_EQ(r.strings_without_program, 0u);
    EXPECT_TRUE(r.exact_under_caps);
  }
  Table doubled = build_table({8, 24, 200000});
  EXPECT_EQ(compute_Tn(doubled, 8).t_n, 16u);
}

TEST(Kolmo, TightCaps) {
  for (unsigned n = 0; n <= 8; ++n) {
    Table t = build_table({n, 2 * n + 6, 10000});
    unsigned missing = 0;
    for (const auto& x : strings_upto(n)) {
      if (x.size() != n) continue;
      auto k = t.k_final(x);
      if (!k) {
        ++missing;
        continue;
      }
      EXPECT_LE(*k, 2 * n + 6) << x;
      EXPECT_LE(*k, 3 * n) << x;
    }
    if (n <= 6) {
      EXPECT_EQ(missing, 0u) << n;
    }
    std::printf("n=%u strings without program at L_max=%u: %u\n", n, 2 * n + 6, missing);
  }
  Table t22 = build_table({8, 22, 100000});
  auto r = compute_Tn(t22, 8);
  Table t22s = build_table({8, 22, 200000});
  EXPECT_EQ(compute_Tn(t22s, 8).t_n, r.t_n);
  std::printf("T_8 at (22, 1e5) = %llu, without program %llu\n", (unsigned long long)r.t_n,
              (unsigned long long)r.strings_without_program);
}

TEST(Kolmo, HaltingAudit) {
  EXPECT_EQ(margin(1, 8), 3u);
  EXPECT_EQ(margin(0, 8), 0u);
  EXPECT_EQ(margin(2, 1), 0u);
  const Table& t = table8();
  auto c = calibrate_margin(t, {1, 2, 3, 4, 5, 6, 7, 8});
  ASSERT_TRUE(c);
  for (unsigned n = 1; n <= 8; ++n) {
    auto tn = compute_Tn(t, n).t_n;
    auto r = halting_bound_check(tn, n, *c, default_audit_cap(tn));
    EXPECT_TRUE(r.passed()) << n;
    EXPECT_GE(r.s_audit, 100 * tn);
    EXPECT_EQ(r.running_at_audit, 0u);
  }
  // a wider audit exposes programs halting after T_n
  auto wide = halting_bound_check(compute_Tn(t, 4).t_n, 16, 0, 1000);
  EXPECT_FALSE(wide.passed());
  EXPECT_GT(wide.proven_loops, 0u);
}

TEST(Kolmo, XMax) {
  const Table& t = table8();
  EXPECT_EQ(x_max(t, 8, 0), "0");
  std::uint64_t tn = compute_Tn(t, 8).t_n;
  unsigned best = 0;
  for (const auto& x : strings_upto(8)) best = std::max(best, *t.k_final(x));
  EXPECT_EQ(t.k_final(x_max(t, 8, tn)), best);
}

TEST(Kolmo, FactorTwo) {
  const Table& t = table8();
  for (unsigned n = 1; n <= 8; ++n) {
    auto r = factor2_check(t, n);
    EXPECT_LE(r.t_prime, r.t_n) << n;
    EXPECT_TRUE(r.half_axioms_consistent);
    EXPECT_TRUE(r.passed()) << n;
    EXPECT_FALSE(r.audited.empty());
  }
}

TEST(Kolmo, JobsIndependent) {
  Caps caps{7, 21, 100000};
  auto a = serialize_table(build_table(caps, 1));
  auto b = serialize_table(build_table(caps, 4));
  EXPECT_EQ(a, b);
}

TEST(KolmoIo, RoundTrip) {
  const Table& t = table8();
  auto bytes = serialize_table(t);
  EXPECT_EQ(bytes.substr(0, 4), "RALK");
  Table back = deserialize_table(bytes);
  EXPECT_EQ(back.caps.l_max, t.caps.l_max);
  EXPECT_EQ(back.caps.s_max, t.caps.s_max);
  EXPECT_EQ(back.programs, t.programs);
  EXPECT_EQ(back.fronts.size(), t.fronts.size());
  for (const auto& [x, f] : t.fronts) EXPECT_EQ(back.front(x)->entries, f.entries);
  EXPECT_EQ(serialize_table(back), bytes);
  EXPECT_THROW(deserialize_table(bytes.substr(0, bytes.size() - 1)), Error);
  EXPECT_THROW(deserialize_table("XXXX"), Error);
}
