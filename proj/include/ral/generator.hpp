#pragma once

// Seeded random strategy instances for the soundness and conservation corpora.

#include "ral/strategy.hpp"

namespace ral {

struct GeneratorConfig {
  unsigned max_length = 6;     ///< N of any predicate
  unsigned max_depth = 3;      ///< randomized/inference steps on a path
  unsigned max_path_bits = 8;  ///< sum of N over randomized steps on a path
  unsigned max_predicates = 2;
  unsigned pool_per_predicate = 3;
  std::size_t max_base_atoms = 12;
};

namespace detail {

class StrategyGenerator {
 public:
  StrategyGenerator(const GeneratorConfig& cfg, std::uint64_t seed) : cfg_(cfg), rng_(seed, 0x5eed) {}

  StrategyInstance generate() {
    unsigned npred = 1 + rng_.below(cfg_.max_predicates);
    for (unsigned i = 0; i < npred; ++i) {
      std::string name = npred == 1 ? "R" : "R" + std::to_string(i);
      unsigned len = 1 + rng_.below(i == 0 && rng_.below(2) == 0 ? std::min(3u, cfg_.max_length) : cfg_.max_length);
      unsigned nf = rng_.below(std::min(4u, (1u << len) / 2 + 1));
      std::set<std::string> f;
      while (f.size() < nf) f.insert(bits_of(rng_.value(len), len));
      s_.ground_truth.define_by_falsifiers(name, len, f);
      preds_.push_back({name, len, f});
      // atom pool mixes falsifiers and random strings
      std::set<std::string> pool;
      for (const auto& x : f)
        if (pool.size() < cfg_.pool_per_predicate / 2 + 1) pool.insert(x);
      while (pool.size() < std::min<std::size_t>(cfg_.pool_per_predicate, std::size_t{1} << len))
        pool.insert(bits_of(rng_.value(len), len));
      for (const auto& x : pool) atoms_.push_back(Formula::pred(name, x));
    }
    s_.ground_truth.set_goal("G", rng_.below(3) != 0);
    s_.ground_truth.set_goal("H", rng_.below(2) == 0);
    atoms_.push_back(Formula::goal("H"));
    s_.goal = Formula::goal("G");

    // a covering family R(x) -> G over part of one short predicate's strings
    if (rng_.below(4) != 0) {
      const Pred& p = preds_[rng_.below(static_cast<std::uint32_t>(preds_.size()))];
      if (p.length <= 3)
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << p.length); ++v)
          if (rng_.below(4) != 0) {
            Formula a = Formula::implies(Formula::pred(p.name, bits_of(v, p.length)), s_.goal);
            if (eval_formula(a, s_.ground_truth)) s_.base_axioms.push_back(a);
          }
    }
    unsigned want = s_.base_axioms.size() + 2 + rng_.below(3);
    for (unsigned tries = 0; tries < 40 && s_.base_axioms.size() < want; ++tries) {
      Formula a = random_axiom();
      std::vector<Formula> trial = s_.base_axioms;
      trial.push_back(a);
      if (count_atoms(trial) > cfg_.max_base_atoms) continue;
      if (eval_formula(a, s_.ground_truth)) s_.base_axioms.push_back(a);
    }
    s_.epsilon = Rational(rng_.below(5), 8);
    s_.root = build(0, s_.epsilon, cfg_.max_path_bits);
    certify(s_);
    return std::move(s_);
  }

 private:
  struct Pred {
    std::string name;
    unsigned length;
    std::set<std::string> falsifiers;
  };

  const Formula& any_atom() { return atoms_[rng_.below(static_cast<std::uint32_t>(atoms_.size()))]; }

  Formula random_axiom() {
    const Formula g = s_.goal;
    switch (rng_.below(5)) {
      case 0:
      case 1: return Formula::implies(any_atom(), g);
      case 2: return Formula::implies(Formula::conj({any_atom(), any_atom()}), g);
      case 3: return Formula::disj({any_atom(), Formula::goal("H")});
      default: return Formula::implies(Formula::goal("H"), g);
    }
  }

  NodeId add(StrategyNode n) {
    s_.nodes.push_back(std::move(n));
    return s_.nodes.size() - 1;
  }

  NodeId leaf() { return add(Leaf{s_.goal}); }

  NodeId build(unsigned depth, const Rational& capital, unsigned bits_left) {
    if (depth >= cfg_.max_depth) return leaf();
    unsigned pick = rng_.below(depth == 0 ? 4 : 6);
    if (pick == 0 && !s_.base_axioms.empty()) {
      std::size_t i = rng_.below(static_cast<std::uint32_t>(s_.base_axioms.size()));
      Formula ax = Formula::disj({s_.base_axioms[i], any_atom()});
      ProofObject just;
      just.lines.push_back({Rule::Axiom, s_.base_axioms[i], {i}, {}});
      just.lines.push_back({Rule::Taut, ax, {0}, {}});
      NodeId child = build(depth + 1, capital, bits_left);
      return add(InferStep{ax, std::move(just), child});
    }
    if (pick >= 4) return leaf();
    std::vector<const Pred*> fits;
    for (const auto& p : preds_)
      if (p.length <= bits_left) fits.push_back(&p);
    if (fits.empty()) return leaf();
    const Pred& p = *fits[rng_.below(static_cast<std::uint32_t>(fits.size()))];
    std::uint64_t strings = std::uint64_t{1} << p.length;
    std::uint64_t num = std::min<std::uint64_t>(strings, p.falsifiers.size() + rng_.below(3));
    Rational delta(num, strings);
    if (delta > capital) return leaf();
    unsigned distinct = 1 + rng_.below(2);
    std::vector<NodeId> kids;
    for (unsigned k = 0; k < distinct; ++k) kids.push_back(build(depth + 1, capital - delta, bits_left - p.length));
    RandomStep r;
    r.pred = p.name;
    r.length = p.length;
    r.delta = delta;
    if (distinct == 1) {
      r.selector = ChildSelector::constant(kids[0]);
    } else {
      std::map<std::string, NodeId> t;
      for (std::uint64_t v = 0; v < strings; ++v) t[bits_of(v, p.length)] = kids[rng_.below(distinct)];
      r.selector = ChildSelector::from_table(std::move(t));
    }
    return add(std::move(r));
  }

  GeneratorConfig cfg_;
  Pcg32 rng_;
  StrategyInstance s_;
  std::vector<Pred> preds_;
  std::vector<Formula> atoms_;
};

}  // namespace detail

inline StrategyInstance generate_strategy(const GeneratorConfig& cfg, std::uint64_t seed) {
  return detail::StrategyGenerator(cfg, seed).generate();
}

}  // namespace ral
