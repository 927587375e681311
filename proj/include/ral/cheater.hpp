#pragma once

// Best possible prover against the verifier over a tiny field, by backward
// induction over rounds, challenge values and every admissible message.
// Values are kept as integer counts of accepting challenge sequences.

#include "ral/protocol.hpp"

#include <map>

namespace ral {

struct CheaterResult {
  std::uint64_t accepting = 0;  ///< challenge sequences (out of q^rounds) won by the optimal prover
  std::uint64_t total = 0;      ///< q^rounds
  Rational value;               ///< accepting / total
  std::uint64_t forward = 0;    ///< recount by replaying the extracted policy against the verifier
  Rational forward_value;
};

class OptimalCheater {
 public:
  /// Rough operation count of the backward induction.
  static double estimated_work(const Arithmetization& ar) {
    const double q = ar.field().size();
    double work = 0;
    for (std::size_t j = 0; j < ar.rounds(); ++j) {
      unsigned d = ar.effective_degree(j);
      double states = std::pow(q, ar.ops()[j].assigned);
      double msgs = d + 1 >= q ? q * q : std::pow(q, d + 1);
      work += states * msgs * q;
    }
    return work;
  }

  /// Throws BudgetError when the estimated work exceeds `budget`.
  OptimalCheater(Arithmetization& ar, std::uint64_t budget = kDefaultBudget) : ar_(ar) {
    if (ar.rounds() * ar.field().bits() > 62) throw BudgetError("q^rounds does not fit in 64 bits");
    double work = estimated_work(ar);
    if (work > static_cast<double>(budget))
      throw BudgetError("optimal cheater needs about " + std::to_string(static_cast<std::uint64_t>(work)) +
                        " operations, budget is " + std::to_string(budget));
  }

  static constexpr std::uint64_t kDefaultBudget = std::uint64_t{1} << 24;

  CheaterResult solve() {
    CheaterResult r;
    const std::uint64_t q = ar_.field().size();
    r.total = 1;
    for (std::size_t j = 0; j < ar_.rounds(); ++j) r.total *= q;
    std::vector<Elem> a(ar_.formula().num_vars(), 0);
    r.accepting = counts(0, a)[1];
    r.value = Rational(r.accepting, r.total);
    r.forward = replay(0, a, 1);
    r.forward_value = Rational(r.forward, r.total);
    return r;
  }

  /// The extracted policy as a prover (valid for positions reached from claim 1).
  Prover prover() {
    return [this](const ProverView& v) {
      auto it = policy_.find(key(v.round, v.assignment, v.claim));
      if (it != policy_.end()) return it->second;
      // no admissible message exists for this claim: send anything
      return Poly1{};
    };
  }

 private:
  using Key = std::pair<std::size_t, std::vector<Elem>>;

  Key state_key(std::size_t j, const std::vector<Elem>& a) const {
    std::size_t w = j < ar_.rounds() ? ar_.ops()[j].assigned : a.size();
    return {j, std::vector<Elem>(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(w))};
  }

  std::pair<Key, Elem> key(std::size_t j, const std::vector<Elem>& a, Elem c) const { return {state_key(j, a), c}; }

  const std::vector<std::uint64_t>& counts(std::size_t j, std::vector<Elem>& a) {
    Key k = state_key(j, a);
    if (auto it = memo_.find(k); it != memo_.end()) return it->second;
    const Field& F = ar_.field();
    const std::uint32_t q = F.size();
    std::vector<std::uint64_t> best(q, 0);
    if (j == ar_.rounds()) {
      best[ar_.matrix_value(a)] = 1;
      return memo_.emplace(std::move(k), std::move(best)).first->second;
    }
    const Op& o = ar_.ops()[j];
    const Elem r_old = a[o.var];
    std::vector<std::vector<std::uint64_t>> next(q);
    for (Elem r = 0; r < q; ++r) {
      a[o.var] = r;
      next[r] = counts(j + 1, a);
    }
    a[o.var] = r_old;
    std::vector<std::optional<Poly1>> arg(q);
    const unsigned d = ar_.effective_degree(j);
    if (d + 1 >= q) {
      // every function F -> F is admissible; maximize pointwise off {0, 1}
      std::uint64_t rest = 0;
      std::vector<Elem> free_choice(q, 0);
      for (Elem r = 2; r < q; ++r) {
        auto m = std::max_element(next[r].begin(), next[r].end());
        rest += *m;
        free_choice[r] = static_cast<Elem>(m - next[r].begin());
      }
      for (Elem a0 = 0; a0 < q; ++a0)
        for (Elem a1 = 0; a1 < q; ++a1) {
          Elem c = round_combine(F, o.type, a0, a1, r_old);
          std::uint64_t v = next[0][a0] + next[1][a1] + rest;
          if (!arg[c] || v > best[c]) {
            std::vector<Elem> xs(q), ys = free_choice;
            for (Elem x = 0; x < q; ++x) xs[x] = x;
            ys[0] = a0;
            ys[1] = a1;
            best[c] = v;
            arg[c] = interpolate(F, xs, ys);
          }
        }
    } else {
      // odometer over coefficient vectors; vals[r] tracks g(r) incrementally
      std::vector<std::vector<Elem>> pw(d + 1, std::vector<Elem>(q));
      for (Elem r = 0; r < q; ++r) {
        Elem x = 1;
        for (unsigned i = 0; i <= d; ++i, x = F.mul(x, r)) pw[i][r] = x;
      }
      std::vector<Elem> coeffs(d + 1, 0), vals(q, 0);
      for (;;) {
        std::uint64_t v = 0;
        for (Elem r = 0; r < q; ++r) v += next[r][vals[r]];
        Elem c = round_combine(F, o.type, vals[0], vals[1], r_old);
        if (!arg[c] || v > best[c]) {
          best[c] = v;
          arg[c] = Poly1(coeffs);
        }
        std::size_t i = 0;
        for (; i <= d; ++i) {
          Elem old_c = coeffs[i];
          coeffs[i] = coeffs[i] + 1 == q ? 0 : coeffs[i] + 1;
          Elem delta = old_c ^ coeffs[i];
          for (Elem r = 0; r < q; ++r) vals[r] ^= F.mul(delta, pw[i][r]);
          if (coeffs[i] != 0) break;
        }
        if (i > d) break;
      }
    }
    for (Elem c = 0; c < q; ++c)
      if (arg[c]) policy_.emplace(key(j, a, c), *arg[c]);
    return memo_.emplace(std::move(k), std::move(best)).first->second;
  }

  /// Counts accepting challenge sequences when the policy plays from (j, a, claim),
  /// using the verifier's own degree and consistency checks.
  std::uint64_t replay(std::size_t j, std::vector<Elem>& a, Elem claim) {
    if (j == ar_.rounds()) return ar_.matrix_value(a) == claim ? 1 : 0;
    auto it = policy_.find(key(j, a, claim));
    if (it == policy_.end()) return 0;
    const Poly1& g = it->second;
    const Op& o = ar_.ops()[j];
    if (g.degree() > static_cast<int>(ar_.effective_degree(j))) return 0;
    if (ar_.implied_claim(j, g, a[o.var]) != claim) return 0;
    const Elem saved = a[o.var];
    std::uint64_t total = 0;
    for (Elem r = 0; r < ar_.field().size(); ++r) {
      a[o.var] = r;
      total += replay(j + 1, a, g.eval(ar_.field(), r));
    }
    a[o.var] = saved;
    return total;
  }

  Arithmetization& ar_;
  std::map<Key, std::vector<std::uint64_t>> memo_;
  std::map<std::pair<Key, Elem>, Poly1> policy_;
};

inline CheaterResult optimal_cheater_value(const QbfFormula& f, unsigned k,
                                           std::uint64_t budget = OptimalCheater::kDefaultBudget) {
  if (k > 4) throw BudgetError("optimal cheater analysis is limited to k <= 4");
  Arithmetization ar(f, k);
  return OptimalCheater(ar, budget).solve();
}

}  // namespace ral
