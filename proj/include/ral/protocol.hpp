#pragma once

// Interactive proof for closed QBF over GF(2^k).
//
// The claim "O_0 O_1 ... O_{m-1} M = 1" is peeled one operator per round,
// outermost first. Operators are quantifiers and linearizations: before the
// i-th quantifier (outer-first) come L over every earlier variable, so that
// each polynomial handed to an outer quantifier is multilinear in the
// variables that stay live.

#include "ral/bits.hpp"
#include "ral/parallel.hpp"
#include "ral/pcg32.hpp"
#include "ral/poly1.hpp"
#include "ral/qbf.hpp"
#include "ral/rational.hpp"

#include <functional>
#include <optional>
#include <unordered_map>

namespace ral {

enum class OpType { Forall, Exists, Linearize };

inline const char* op_name(OpType t) {
  switch (t) {
    case OpType::Forall: return "forall";
    case OpType::Exists: return "exists";
    case OpType::Linearize: return "lin";
  }
  return "?";
}

struct Op {
  OpType type = OpType::Forall;
  unsigned var = 0;
  unsigned assigned = 0;  ///< variables 0..assigned-1 carry values when this round starts
  unsigned degree = 0;    ///< formal degree of the round polynomial
};

inline std::vector<Op> operator_sequence(const QbfFormula& f) {
  std::vector<Op> ops;
  for (std::size_t i = 0; i < f.prefix.size(); ++i) {
    if (f.prefix[i].var != i) throw Error("prefix variables must be numbered in order");
    for (unsigned l = 0; l < i; ++l) ops.push_back({OpType::Linearize, l, static_cast<unsigned>(i), 0});
    ops.push_back({f.prefix[i].forall ? OpType::Forall : OpType::Exists, static_cast<unsigned>(i),
                   static_cast<unsigned>(i), 0});
  }
  // degrees, inner to outer
  auto d = f.matrix.degrees(f.num_vars());
  for (std::size_t j = ops.size(); j-- > 0;) {
    Op& o = ops[j];
    o.degree = d[o.var];
    if (o.type == OpType::Linearize) {
      d[o.var] = std::min(d[o.var], 1u);
    } else {
      for (std::size_t u = 0; u < d.size(); ++u) d[u] = u == o.var ? 0 : 2 * d[u];
    }
  }
  return ops;
}

/// Verifier's consistency relation between the message values g(0), g(1)
/// and the claim; `r_old` is the linearized variable's current value.
inline Elem round_combine(const Field& F, OpType t, Elem g0, Elem g1, Elem r_old) {
  switch (t) {
    case OpType::Forall: return F.mul(g0, g1);
    case OpType::Exists: return g0 ^ g1 ^ F.mul(g0, g1);
    case OpType::Linearize: return F.mul(r_old, g1) ^ F.mul(1 ^ r_old, g0);
  }
  return 0;
}

/// Arithmetized instance with its round structure over a fixed field.
class Arithmetization {
 public:
  Arithmetization(QbfFormula f, unsigned k) : f_(std::move(f)), F_(k), ops_(operator_sequence(f_)) {}

  const QbfFormula& formula() const { return f_; }
  const Field& field() const { return F_; }
  const std::vector<Op>& ops() const { return ops_; }
  std::size_t rounds() const { return ops_.size(); }

  /// Degree bound the verifier enforces: min(d, q-1).
  unsigned effective_degree(std::size_t j) const { return std::min<unsigned>(ops_[j].degree, F_.size() - 1); }

  std::uint64_t degree_sum() const {
    std::uint64_t s = 0;
    for (std::size_t j = 0; j < ops_.size(); ++j) s += effective_degree(j);
    return s;
  }

  /// (sum of round degree bounds) / 2^k.
  Rational soundness_bound() const { return Rational(degree_sum(), F_.size()); }

  Elem matrix_value(const std::vector<Elem>& a) const { return f_.matrix.arith(F_, a); }

  /// Value of ops[j..] applied to the matrix at assignment a (only the first
  /// ops[j].assigned entries matter; Linearize rounds also read a[var]).
  Elem value(std::size_t j, std::vector<Elem>& a) {
    if (j == ops_.size()) return matrix_value(a);
    std::size_t width = ops_[j].assigned;
    std::string key(reinterpret_cast<const char*>(a.data()), width * sizeof(Elem));
    key.push_back(static_cast<char>(j));
    key.push_back(static_cast<char>(j >> 8));
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const Op& o = ops_[j];
    Elem save = a[o.var];
    a[o.var] = 0;
    Elem f0 = value(j + 1, a);
    a[o.var] = 1;
    Elem f1 = value(j + 1, a);
    a[o.var] = save;
    Elem r = round_combine(F_, o.type, f0, f1, save);
    if (memo_.size() > (1u << 22)) memo_.clear();
    memo_.emplace(std::move(key), r);
    return r;
  }

  /// The true round-j polynomial g(X) = value(j+1, a[var := X]).
  Poly1 round_poly(std::size_t j, std::vector<Elem> a) {
    unsigned d = effective_degree(j);
    std::vector<Elem> xs, ys;
    for (Elem x = 0; x <= d; ++x) {
      a[ops_[j].var] = x;
      xs.push_back(x);
      ys.push_back(value(j + 1, a));
    }
    return interpolate(F_, xs, ys);
  }

  /// Claim value the message g implies for round j.
  Elem implied_claim(std::size_t j, const Poly1& g, Elem r_old) const {
    return round_combine(F_, ops_[j].type, g.eval(F_, 0), g.eval(F_, 1), r_old);
  }

 private:
  QbfFormula f_;
  Field F_;
  std::vector<Op> ops_;
  std::unordered_map<std::string, Elem> memo_;
};

struct RoundRecord {
  std::size_t round = 0;
  OpType type = OpType::Forall;
  unsigned var = 0;
  Poly1 message;
  Elem claim_before = 0;
  bool degree_ok = false;
  bool consistent = false;
  Elem challenge = 0;
  Elem claim_after = 0;
};

struct ProtocolRun {
  bool accepted = false;
  std::vector<RoundRecord> rounds;
  bool final_ok = false;
  std::optional<std::size_t> rejected_at;  ///< round index, or rounds() for the final check
};

/// What a prover sees when choosing the round-j message.
struct ProverView {
  Arithmetization& arith;
  std::size_t round;
  const std::vector<Elem>& assignment;
  Elem claim;
};

using Prover = std::function<Poly1(const ProverView&)>;

inline Prover honest_prover() {
  return [](const ProverView& v) { return v.arith.round_poly(v.round, v.assignment); };
}

/// Challenge source: k bits per round from Pcg32(seed, stream), MSB first.
inline Elem draw_challenge(Pcg32& rng, unsigned k) { return static_cast<Elem>(value_of(rng.bits(k))); }

inline ProtocolRun run_protocol(Arithmetization& ar, const Prover& prover, std::uint64_t seed) {
  const Field& F = ar.field();
  Pcg32 rng(seed, 0x51ab);
  ProtocolRun run;
  std::vector<Elem> a(ar.formula().num_vars(), 0);
  Elem claim = 1;
  for (std::size_t j = 0; j < ar.rounds(); ++j) {
    const Op& o = ar.ops()[j];
    RoundRecord rec;
    rec.round = j;
    rec.type = o.type;
    rec.var = o.var;
    rec.claim_before = claim;
    rec.message = prover(ProverView{ar, j, a, claim});
    rec.degree_ok = rec.message.degree() <= static_cast<int>(ar.effective_degree(j));
    for (Elem c : rec.message.coeffs) rec.degree_ok = rec.degree_ok && F.contains(c);
    rec.consistent = rec.degree_ok && ar.implied_claim(j, rec.message, a[o.var]) == claim;
    if (!rec.consistent) {
      run.rounds.push_back(rec);
      run.rejected_at = j;
      return run;
    }
    rec.challenge = draw_challenge(rng, F.bits());
    rec.claim_after = rec.message.eval(F, rec.challenge);
    a[o.var] = rec.challenge;
    claim = rec.claim_after;
    run.rounds.push_back(rec);
  }
  run.final_ok = ar.matrix_value(a) == claim;
  run.accepted = run.final_ok;
  if (!run.final_ok) run.rejected_at = ar.rounds();
  return run;
}

/// Two target values (a0, a1) satisfying the round relation for `claim`,
/// preferring ones that differ from (g0, g1) in exactly one coordinate.
inline std::pair<Elem, Elem> solve_round(const Field& F, OpType t, Elem claim, Elem r_old, Elem g0, Elem g1) {
  auto try_a0 = [&](Elem a0) -> std::optional<Elem> {
    // relation is linear in a1: A*a1 = B
    Elem A, B;
    switch (t) {
      case OpType::Forall: A = a0, B = claim; break;
      case OpType::Exists: A = 1 ^ a0, B = claim ^ a0; break;
      default: A = r_old, B = claim ^ F.mul(1 ^ r_old, a0); break;
    }
    if (A != 0) return F.div(B, A);
    if (B == 0) return g1;
    return std::nullopt;
  };
  std::optional<std::pair<Elem, Elem>> fallback;
  for (std::uint32_t i = 0; i <= F.size(); ++i) {
    Elem a0 = i == 0 ? g0 : static_cast<Elem>(i - 1);
    if (auto a1 = try_a0(a0)) {
      if ((a0 ^ g0) != (*a1 ^ g1)) return {a0, *a1};
      if (!fallback) fallback = std::pair{a0, *a1};
    }
  }
  if (!fallback) throw Error("round relation has no solution");
  return *fallback;
}

/// Cheats only while the current claim is false: shifts the honest polynomial
/// by a linear term so the relation holds, then plays honestly once a
/// challenge lands on a point where the shifted and true polynomials agree.
inline Prover greedy_adversary() {
  return [](const ProverView& v) {
    const Field& F = v.arith.field();
    const Op& o = v.arith.ops()[v.round];
    Poly1 g = v.arith.round_poly(v.round, v.assignment);
    Elem r_old = v.assignment[o.var];
    if (v.arith.implied_claim(v.round, g, r_old) == v.claim) return g;
    Elem g0 = g.eval(F, 0), g1 = g.eval(F, 1);
    if (v.arith.effective_degree(v.round) == 0) {
      // constant messages only: the relation forces a single value
      Elem c = o.type == OpType::Linearize ? v.claim : F.sqrt(v.claim);
      return Poly1({c});
    }
    auto [a0, a1] = solve_round(F, o.type, v.claim, r_old, g0, g1);
    // g + (a0 - g0)(1 + X) + (a1 - g1) X
    Poly1 shift({a0 ^ g0, (a0 ^ g0) ^ (a1 ^ g1)});
    return poly_add(g, shift);
  };
}

struct AcceptanceEstimate {
  std::uint64_t seeds = 0;
  std::uint64_t accepted = 0;
  double rate = 0;
  double std_error = 0;
};

/// Seeds are split into fixed chunks, each with its own copy of `ar`, so the
/// count does not depend on `jobs`.
inline AcceptanceEstimate acceptance_rate(Arithmetization& ar, const Prover& p, std::uint64_t seeds,
                                          std::uint64_t base_seed, unsigned jobs = 1) {
  constexpr std::uint64_t kChunk = 512;
  AcceptanceEstimate e;
  e.seeds = seeds;
  if (jobs <= 1) {
    for (std::uint64_t i = 0; i < seeds; ++i) e.accepted += run_protocol(ar, p, derive_seed(base_seed, i)).accepted;
  } else {
    std::size_t chunks = static_cast<std::size_t>((seeds + kChunk - 1) / kChunk);
    auto counts = parallel_map<std::uint64_t>(chunks, jobs, [&](std::size_t c) {
      Arithmetization local = ar;
      std::uint64_t n = 0;
      for (std::uint64_t i = c * kChunk; i < std::min(seeds, (c + 1) * kChunk); ++i)
        n += run_protocol(local, p, derive_seed(base_seed, i)).accepted;
      return n;
    });
    for (auto n : counts) e.accepted += n;
  }
  e.rate = seeds ? static_cast<double>(e.accepted) / static_cast<double>(seeds) : 0;
  e.std_error = seeds ? std::sqrt(e.rate * (1 - e.rate) / static_cast<double>(seeds)) : 0;
  return e;
}

}  // namespace ral
