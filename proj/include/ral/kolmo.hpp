#pragma once

// Complexity tables for the toy machine under explicit caps, and the
// experiments built on them: counting bound, incompressibility sampling,
// settling time T_n, the halting audit and the factor-2 check.

#include "ral/parallel.hpp"
#include "ral/pcg32.hpp"
#include "ral/rational.hpp"
#include "ral/vm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

namespace ral::kolmo {

struct Caps {
  unsigned n = 8;                    ///< longest string tabulated
  unsigned l_max = 24;               ///< program bits
  std::uint64_t s_max = 100000;      ///< steps

  static Caps defaults(unsigned n) { return {n, std::min(3 * n, 30u), 100000}; }
};

/// For one string: fewest steps achieved by a program of each bit length,
/// kept only where it beats every shorter length.
struct Front {
  std::vector<std::pair<unsigned, std::uint64_t>> entries;  ///< (bits, steps), bits ascending

  void add(unsigned bits, std::uint64_t steps) {
    for (auto& e : entries)
      if (e.first <= bits && e.second <= steps) return;
    std::vector<std::pair<unsigned, std::uint64_t>> kept;
    for (const auto& e : entries)
      if (!(bits <= e.first && steps <= e.second)) kept.push_back(e);
    kept.push_back({bits, steps});
    std::sort(kept.begin(), kept.end());
    entries = std::move(kept);
  }

  void merge(const Front& o) {
    for (const auto& e : o.entries) add(e.first, e.second);
  }

  /// Shortest program halting within t steps.
  std::optional<unsigned> k_at(std::uint64_t t) const {
    for (const auto& e : entries)
      if (e.second <= t) return e.first;
    return std::nullopt;
  }

  std::optional<unsigned> k_final() const {
    if (entries.empty()) return std::nullopt;
    return entries.front().first;
  }

  /// Time at which k_at first equals k_final.
  std::optional<std::uint64_t> settle_time() const {
    if (entries.empty()) return std::nullopt;
    return entries.front().second;
  }

  /// Earliest t with k_at(t) <= bound.
  std::optional<std::uint64_t> time_for(unsigned bound) const {
    std::optional<std::uint64_t> best;
    for (const auto& e : entries)
      if (e.first <= bound && (!best || e.second < *best)) best = e.second;
    return best;
  }
};

struct Table {
  Caps caps;
  std::map<std::string, Front> fronts;  ///< every string of length <= caps.n with some program
  std::uint64_t programs = 0;    ///< instruction sequences explored
  std::uint64_t unresolved = 0;  ///< prefixes still running at s_max without a loop proof

  bool exact_under_caps() const { return unresolved == 0; }

  const Front* front(const std::string& x) const {
    auto it = fronts.find(x);
    return it == fronts.end() ? nullptr : &it->second;
  }
  std::optional<unsigned> k_t(const std::string& x, std::uint64_t t) const {
    const Front* f = front(x);
    return f ? f->k_at(t) : std::nullopt;
  }
  std::optional<unsigned> k_final(const std::string& x) const {
    const Front* f = front(x);
    return f ? f->k_final() : std::nullopt;
  }

  /// Distinct step counts at which some entry appears, ascending.
  std::vector<std::uint64_t> schedule() const {
    std::vector<std::uint64_t> t;
    for (const auto& [_, f] : fronts)
      for (const auto& e : f.entries) t.push_back(e.second);
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return t;
  }
};

/// All strings of length <= n in std::string order ("" < "0" < "00" < ... < "1").
inline std::vector<std::string> strings_upto(unsigned n) {
  std::vector<std::string> out;
  for (unsigned len = 0; len <= n; ++len)
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << len); ++v) out.push_back(bits_of(v, len));
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

struct Enumerator {
  Caps caps;
  std::map<std::string, Front> fronts;
  std::uint64_t programs = 0;
  std::uint64_t unresolved = 0;
  vm::Program prog;

  void record(const std::string& out, unsigned bits, std::uint64_t steps) {
    if (out.size() <= caps.n) fronts[out].add(bits, steps);
  }

  // prog ends with a freshly appended instruction; st is the state at the old end
  void extend(vm::State st, unsigned bits) {
    ++programs;
    auto o = vm::advance(prog, st, caps.s_max, caps.n);
    if (o.status == vm::Status::Halted) {
      record(st.output, bits, st.steps);
      if (o.reached_end) children(st, bits);
    } else if (o.status == vm::Status::Running && !o.proven_loop) {
      ++unresolved;
    }
  }

  void children(const vm::State& st, unsigned bits) {
    for (const auto& in : vm::instruction_set()) {
      if (bits + in.bits() > caps.l_max) continue;
      prog.push_back(in);
      extend(st, bits + in.bits());
      prog.pop_back();
    }
  }
};

}  // namespace detail

/// Exhaustive enumeration of every program of at most l_max bits. Work is
/// split by first instruction; the result does not depend on `jobs`.
inline Table build_table(const Caps& caps, unsigned jobs = 1) {
  if (caps.n > 16) throw Error("tables are limited to strings of length <= 16");
  const auto& set = vm::instruction_set();
  auto parts = parallel_map<detail::Enumerator>(set.size(), jobs, [&](std::size_t i) {
    detail::Enumerator e;
    e.caps = caps;
    if (set[i].bits() > caps.l_max) return e;
    e.prog.push_back(set[i]);
    e.extend(vm::State{}, set[i].bits());
    return e;
  });
  Table t;
  t.caps = caps;
  t.fronts[""].add(0, 0);  // the empty program
  t.programs = 1;
  for (const auto& p : parts) {
    for (const auto& [x, f] : p.fronts) t.fronts[x].merge(f);
    t.programs += p.programs;
    t.unresolved += p.unresolved;
  }
  return t;
}

/// Single-target search: fewest bits of a program printing x within t steps,
/// pruning any prefix whose output stops being a prefix of x.
inline std::optional<unsigned> k_t_search(const std::string& x, std::uint64_t t, unsigned l_max) {
  std::optional<unsigned> best;
  if (x.empty()) return 0u;
  vm::Program prog;
  std::function<void(const vm::State&, unsigned)> go = [&](const vm::State& st, unsigned bits) {
    for (const auto& in : vm::instruction_set()) {
      unsigned nb = bits + in.bits();
      if (nb > l_max || (best && nb >= *best)) continue;
      prog.push_back(in);
      vm::State s2 = st;
      auto o = vm::advance(prog, s2, t, x.size());
      bool prefix = x.compare(0, s2.output.size(), s2.output) == 0;
      if (o.status == vm::Status::Halted && prefix) {
        if (s2.output == x) best = nb;
        else if (o.reached_end) go(s2, nb);
      }
      prog.pop_back();
    }
  };
  go(vm::State{}, 0);
  return best;
}

// --- experiments --------------------------------------------------------------

struct CountingReport {
  unsigned n = 0;
  unsigned c = 0;
  std::uint64_t compressible = 0;  ///< strings of length n with k_final < n - c
  Rational fraction;
  Rational bound;                  ///< 2^-c
  bool holds = false;
};

inline CountingReport counting_check(const Table& t, unsigned n, unsigned c) {
  if (n > t.caps.n) throw Error("table covers strings up to length " + std::to_string(t.caps.n));
  CountingReport r;
  r.n = n;
  r.c = c;
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
    auto k = t.k_final(bits_of(v, n));
    if (k && c < n && *k < n - c) ++r.compressible;
  }
  r.fraction = Rational(r.compressible, std::uint64_t{1} << n);
  r.bound = Rational(1) / Rational(pow2(c));
  r.holds = r.fraction <= r.bound;
  return r;
}

struct AxiomSample {
  std::string x;
  unsigned n = 0;
  unsigned c = 0;
  std::optional<unsigned> k_final;
  bool valid = true;  ///< "K(x) >= n - c" not refuted by the table

  std::string statement() const { return "K(" + x + ") >= " + std::to_string(static_cast<int>(n) - static_cast<int>(c)); }
};

inline AxiomSample sample_axiom(const Table& t, unsigned n, unsigned c, std::uint64_t seed) {
  if (n > t.caps.n) throw Error("table covers strings up to length " + std::to_string(t.caps.n));
  Pcg32 rng(seed, 0x6b6f);
  AxiomSample s;
  s.n = n;
  s.c = c;
  s.x = rng.bits(n);
  s.k_final = t.k_final(s.x);
  s.valid = !s.k_final || c >= n || *s.k_final >= n - c;
  return s;
}

struct TnReport {
  unsigned n = 0;
  std::uint64_t t_n = 0;
  std::string witness;               ///< a string settling last
  bool exact_under_caps = false;     ///< no unresolved program within the caps
  std::uint64_t strings_without_program = 0;
};

inline TnReport compute_Tn(const Table& t, unsigned n) {
  if (n > t.caps.n) throw Error("table covers strings up to length " + std::to_string(t.caps.n));
  TnReport r;
  r.n = n;
  r.exact_under_caps = t.exact_under_caps();
  for (const auto& x : strings_upto(n)) {
    const Front* f = t.front(x);
    if (!f) {
      ++r.strings_without_program;
      continue;
    }
    if (*f->settle_time() > r.t_n || r.witness.empty()) {
      r.t_n = std::max(r.t_n, *f->settle_time());
      r.witness = x;
    }
  }
  return r;
}

/// Margin ceil(c * log2 n), zero for n <= 1.
inline unsigned margin(double c, unsigned n) {
  if (n <= 1 || c <= 0) return 0;
  return static_cast<unsigned>(std::ceil(c * std::log2(static_cast<double>(n)) - 1e-12));
}

struct HaltingReport {
  unsigned n = 0;
  double c = 0;
  unsigned max_bits = 0;  ///< audited programs have at most this many bits
  std::uint64_t t_n = 0;
  std::uint64_t s_audit = 0;
  std::uint64_t programs = 0;
  std::uint64_t halted_by_tn = 0;
  std::uint64_t proven_loops = 0;
  std::uint64_t running_at_audit = 0;
  std::vector<std::pair<std::string, std::uint64_t>> counterexamples;  ///< (program bits, halting step)
  bool passed() const { return counterexamples.empty(); }
};

/// Every instruction sequence of at most max_bits bits either halts within
/// T_n steps or does not halt within s_audit steps.
inline HaltingReport halting_bound_check(std::uint64_t t_n, unsigned n, double c, std::uint64_t s_audit) {
  HaltingReport r;
  r.n = n;
  r.c = c;
  r.t_n = t_n;
  r.s_audit = s_audit;
  unsigned m = margin(c, n);
  r.max_bits = n >= m ? n - m : 0;
  vm::Program prog;
  std::function<void(unsigned)> go = [&](unsigned bits) {
    ++r.programs;
    auto res = vm::run_control(prog, s_audit);
    if (res.status == vm::Status::Halted) {
      if (res.steps <= t_n) ++r.halted_by_tn;
      else r.counterexamples.push_back({vm::encode(prog), res.steps});
    } else if (res.proven_loop) {
      ++r.proven_loops;
    } else {
      ++r.running_at_audit;
    }
    for (const auto& in : vm::instruction_set()) {
      if (bits + in.bits() > r.max_bits) continue;
      prog.push_back(in);
      go(bits + in.bits());
      prog.pop_back();
    }
  };
  go(0);
  return r;
}

inline std::uint64_t default_audit_cap(std::uint64_t t_n) { return std::max<std::uint64_t>(1000000, 100 * t_n); }

/// Smallest integer c in [0, c_max] for which the audit passes at every n.
inline std::optional<unsigned> calibrate_margin(const Table& t, const std::vector<unsigned>& ns, unsigned c_max = 8) {
  for (unsigned c = 0; c <= c_max; ++c) {
    bool ok = true;
    for (unsigned n : ns) {
      auto tn = compute_Tn(t, n).t_n;
      if (!halting_bound_check(tn, n, c, default_audit_cap(tn)).passed()) {
        ok = false;
        break;
      }
    }
    if (ok) return c;
  }
  return std::nullopt;
}

/// Lexicographically first string of length <= n maximizing k_t(., t);
/// "no program" counts as +infinity.
inline std::string x_max(const Table& t, unsigned n, std::uint64_t time) {
  std::string best;
  std::optional<std::optional<unsigned>> best_k;
  auto greater = [](const std::optional<unsigned>& a, const std::optional<unsigned>& b) {
    if (!b) return false;
    if (!a) return true;
    return *a > *b;
  };
  for (const auto& x : strings_upto(n)) {
    auto k = t.k_t(x, time);
    if (!best_k || greater(k, *best_k)) {
      best = x;
      best_k = k;
    }
  }
  return best;
}

struct Factor2Report {
  unsigned n = 0;
  std::uint64_t t_prime = 0;  ///< min T with k_T(x) <= 2 k_final(x) for all |x| <= n
  std::uint64_t t_n = 0;
  unsigned max_k = 0;         ///< max k_final over |x| <= n
  std::vector<std::uint64_t> audited;
  std::vector<std::pair<std::uint64_t, std::string>> failures;  ///< (t, x_max) with k_final(x_max) < max_k / 2
  bool half_axioms_consistent = true;
  bool passed() const { return failures.empty() && half_axioms_consistent; }
};

inline Factor2Report factor2_check(const Table& t, unsigned n) {
  Factor2Report r;
  r.n = n;
  r.t_n = compute_Tn(t, n).t_n;
  for (const auto& x : strings_upto(n)) {
    const Front* f = t.front(x);
    if (!f) continue;
    unsigned k = *f->k_final();
    r.max_k = std::max(r.max_k, k);
    r.t_prime = std::max(r.t_prime, *f->time_for(2 * k));
  }
  auto times = t.schedule();
  if (times.empty() || times.back() != t.caps.s_max) times.push_back(t.caps.s_max);
  for (std::uint64_t time : times) {
    if (time <= r.t_prime || time > t.caps.s_max) continue;
    r.audited.push_back(time);
    std::string xm = x_max(t, n, time);
    auto k = t.k_final(xm);
    if (k && 2 * *k < r.max_k) r.failures.push_back({time, xm});
  }
  // half-axiom set {K(x) >= ceil(k_final(x)/2)} against the table's upper bounds
  for (const auto& [x, f] : t.fronts) {
    if (x.size() > n) continue;
    unsigned need = (*f.k_final() + 1) / 2;
    for (const auto& e : f.entries)
      if (e.first < need) r.half_axioms_consistent = false;
  }
  return r;
}

}  // namespace ral::kolmo
