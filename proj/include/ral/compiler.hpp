#pragma once

// Turns a strategy whose success probability beats its capital into an
// ordinary proof object. Strong vertices are found by backward induction;
// a strong randomized step is discharged with one counting-rule disjunction
// over its strong sons.
//
// Every proof line produced for a vertex u concludes chain(H_u, F), where
// H_u lists the formulas accepted on the path to u and F is the goal.

#include "ral/strategy.hpp"

#include <cmath>

namespace ral {

struct MarkEntry {
  NodeId node = 0;
  std::vector<std::string> path;  ///< sampled strings / "infer" labels from the root
  Rational p;
  Rational rho;
  bool strong = false;
  std::optional<std::size_t> line;  ///< compiled line concluding chain(H_u, F)
};

struct StrongMarking {
  std::vector<MarkEntry> entries;  ///< one per distinct (node, accepted set, capital)
  std::size_t root = 0;            ///< index of the root entry

  const MarkEntry& root_entry() const { return entries.at(root); }
};

struct CompileResult {
  StrongMarking marking;
  std::optional<ProofObject> proof;  ///< absent when the root is weak
  std::size_t proof_size = 0;        ///< symbol count with shared subproofs counted at every use
  std::vector<Formula> declared;     ///< axioms the proof cites by index
  std::string reason;                ///< why there is no proof
};

namespace detail {

class Compiler {
 public:
  explicit Compiler(const StrategyInstance& s) : s_(s), declared_(declared_axioms(s)) {}

  CompileResult run() {
    check_budget(s_);
    CompileResult res;
    res.declared = declared_;
    std::vector<Formula> h;
    std::vector<std::string> path;
    std::size_t root = mark(s_.root, h, path, s_.epsilon);
    const auto& e = marking_.entries[root];
    if (e.strong) {
      res.proof_size = emit(root, h).second;
      res.proof = std::move(proof_);
    } else {
      res.reason = "not-derivable: root is weak (p = " + to_string(e.p) + ", epsilon = " + to_string(s_.epsilon) + ")";
    }
    res.marking = std::move(marking_);
    res.marking.root = root;
    return res;
  }

 private:
  struct Key {
    NodeId node;
    std::string accepted;
    std::string rho;
    bool operator<(const Key& o) const {
      return std::tie(node, accepted, rho) < std::tie(o.node, o.accepted, o.rho);
    }
  };

  // --- marking -------------------------------------------------------------

  std::size_t mark(NodeId u, std::vector<Formula>& h, std::vector<std::string>& path, const Rational& rho) {
    Key key{u, accepted_key(u, h), to_string(rho)};
    if (auto it = index_.find(key); it != index_.end()) return it->second;
    MarkEntry e;
    e.node = u;
    e.path = path;
    e.rho = rho;
    const auto& n = s_.node(u);
    std::vector<std::size_t> kids;
    if (const auto* l = std::get_if<Leaf>(&n)) {
      std::vector<Formula> all = s_.base_axioms;
      all.insert(all.end(), h.begin(), h.end());
      e.strong = l->goal == s_.goal && entails(all, l->goal, s_.options.entail);
      e.p = e.strong ? 1 : 0;
    } else if (const auto* inf = std::get_if<InferStep>(&n)) {
      h.push_back(inf->axiom);
      path.push_back("infer");
      std::size_t k = mark(inf->child, h, path, rho);
      path.pop_back();
      h.pop_back();
      e.p = marking_.entries[k].p;
      e.strong = marking_.entries[k].strong;
      kids.push_back(k);
    } else {
      const auto& r = std::get<RandomStep>(n);
      Rational sum = 0;
      std::uint64_t strong = 0;
      for (std::uint64_t v = 0; v < (std::uint64_t{1} << r.length); ++v) {
        std::string x = bits_of(v, r.length);
        h.push_back(r.accepted(x));
        path.push_back(x);
        std::size_t k = mark(r.selector.select(x), h, path, rho - r.delta);
        path.pop_back();
        h.pop_back();
        sum += marking_.entries[k].p;
        strong += marking_.entries[k].strong;
        kids.push_back(k);
      }
      e.p = sum / Rational(pow2(r.length));
      e.strong = Rational(strong) > r.delta * Rational(pow2(r.length));
    }
    std::size_t idx = marking_.entries.size();
    marking_.entries.push_back(std::move(e));
    children_.push_back(std::move(kids));
    index_.emplace(std::move(key), idx);
    return idx;
  }

  // --- emission ------------------------------------------------------------

  std::size_t add(ProofLine l) {
    proof_.lines.push_back(std::move(l));
    return proof_.lines.size() - 1;
  }

  std::size_t axiom_line(std::size_t i) {
    if (auto it = axiom_lines_.find(i); it != axiom_lines_.end()) return it->second;
    std::size_t line = add({Rule::Axiom, declared_[i], {i}, {}});
    axiom_lines_.emplace(i, line);
    return line;
  }

  std::size_t declared_index(const Formula& f) const {
    auto it = std::find(declared_.begin(), declared_.end(), f);
    if (it == declared_.end()) throw Error("formula " + f.str() + " is not a declared axiom");
    return static_cast<std::size_t>(it - declared_.begin());
  }

  /// Lines proving chain(h, target) from the base axioms, where base ∪ h
  /// entails target. Returns {line, symbol count added}.
  std::pair<std::size_t, std::size_t> prove_chain(const std::vector<Formula>& h, const Formula& target) {
    std::size_t before = proof_.size();
    Formula goal = implication_chain(h, target);
    for (std::size_t i = 0; i < s_.base_axioms.size(); ++i)
      if (s_.base_axioms[i] == goal) {
        std::size_t l = axiom_line(i);
        return {l, proof_.size() - before};
      }
    std::size_t cap = std::max<std::size_t>(s_.options.entail.max_atoms, 1u << 16);
    if (tautological_consequence(std::span<const Formula>(s_.base_axioms), goal, cap)) {
      std::vector<std::size_t> refs;
      for (std::size_t i = 0; i < s_.base_axioms.size(); ++i) refs.push_back(axiom_line(i));
      std::size_t l = add({Rule::Taut, goal, std::move(refs), {}});
      return {l, proof_.size() - before};
    }
    // counting closure from base CountAtMost axioms over the query's atoms
    std::map<std::string, Formula> atoms;
    for (const auto& a : s_.base_axioms) collect_atoms(a, atoms);
    for (const auto& a : h) collect_atoms(a, atoms);
    collect_atoms(target, atoms);
    std::vector<std::size_t> refs;
    for (std::size_t i = 0; i < s_.base_axioms.size(); ++i) refs.push_back(axiom_line(i));
    for (std::size_t i = 0; i < s_.base_axioms.size(); ++i) {
      const Formula& c = s_.base_axioms[i];
      if (c.kind() != FormulaKind::CountAtMost) continue;
      std::vector<std::string> members;
      for (const auto& [_, a] : atoms)
        if (a.kind() == FormulaKind::Pred && a.name() == c.name() && a.bits().size() == c.length())
          members.push_back(a.bits());
      BigInt bound = floor_nonneg(c.delta() * Rational(pow2(c.length())));
      if (BigInt(members.size()) <= bound) continue;
      std::size_t k = bound.convert_to<std::size_t>() + 1;
      double lines = std::lgamma(members.size() + 1.0) - std::lgamma(k + 1.0) - std::lgamma(members.size() - k + 1.0);
      if (lines > std::log(4096.0))
        throw Error("not-derivable: counting closure over " + std::to_string(members.size()) + " atoms needs too many lines");
      std::vector<bool> pick(members.size(), false);
      std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), true);
      do {
        std::vector<std::string> w;
        for (std::size_t j = 0; j < members.size(); ++j)
          if (pick[j]) w.push_back(members[j]);
        Formula d = counting_conclusion(c.name(), w);
        refs.push_back(add({Rule::Counting, d, {axiom_line(i)}, w}));
      } while (std::prev_permutation(pick.begin(), pick.end()));
    }
    std::vector<Formula> prem;
    for (auto r : refs) prem.push_back(proof_.lines[r].formula);
    if (!tautological_consequence(prem, goal, cap))
      throw Error("not-derivable: cannot reproduce the entailment of " + goal.str() + " with counting lines");
    std::size_t l = add({Rule::Taut, goal, std::move(refs), {}});
    return {l, proof_.size() - before};
  }

  /// Emits the proof for a strong entry; returns {line, full symbol count}.
  std::pair<std::size_t, std::size_t> emit(std::size_t idx, std::vector<Formula>& h) {
    auto& e = marking_.entries[idx];
    if (!e.strong) throw Error("internal: emitting a weak vertex");
    if (e.line) return {*e.line, full_size_[idx]};
    const auto& n = s_.node(e.node);
    std::pair<std::size_t, std::size_t> out;
    if (std::holds_alternative<Leaf>(n)) {
      out = prove_chain(h, s_.goal);
    } else if (const auto* inf = std::get_if<InferStep>(&n)) {
      // chain(h, psi) and chain(h, psi -> F) give chain(h, F)
      h.push_back(inf->axiom);
      auto son = emit(children_[idx][0], h);
      h.pop_back();
      auto lemma = prove_chain(h, inf->axiom);
      std::size_t before = proof_.size();
      std::size_t l = add({Rule::Taut, implication_chain(h, s_.goal), {lemma.first, son.first}, {}});
      out = {l, son.second + lemma.second + proof_.size() - before};
    } else {
      const auto& r = std::get<RandomStep>(n);
      std::vector<std::string> strong;
      std::vector<std::size_t> refs;
      std::size_t size = 0;
      for (std::uint64_t v = 0; v < (std::uint64_t{1} << r.length); ++v) {
        std::size_t k = children_[idx][v];
        if (!marking_.entries[k].strong) continue;
        std::string x = bits_of(v, r.length);
        strong.push_back(x);
        h.push_back(r.accepted(x));
        auto son = emit(k, h);
        h.pop_back();
        refs.push_back(son.first);
        size += son.second;
      }
      std::size_t before = proof_.size();
      std::size_t src = axiom_line(declared_index(r.premise()));
      std::size_t cnt = add({Rule::Counting, counting_conclusion(r.pred, strong), {src}, strong});
      refs.insert(refs.begin(), cnt);
      std::size_t l = add({Rule::Taut, implication_chain(h, s_.goal), std::move(refs), {}});
      out = {l, size + proof_.size() - before};
    }
    marking_.entries[idx].line = out.first;
    full_size_[idx] = out.second;
    return out;
  }

  const StrategyInstance& s_;
  std::vector<Formula> declared_;
  StrongMarking marking_;
  std::vector<std::vector<std::size_t>> children_;
  std::map<Key, std::size_t> index_;
  ProofObject proof_;
  std::map<std::size_t, std::size_t> axiom_lines_;
  std::map<std::size_t, std::size_t> full_size_;
};

}  // namespace detail

/// Backward-induction marking only (no proof lines).
inline StrongMarking mark_strong(const StrategyInstance& s) {
  auto r = detail::Compiler(s).run();
  for (auto& e : r.marking.entries) e.line.reset();
  return r.marking;
}

/// Marks and, when the root is strong, assembles the proof of the goal.
inline CompileResult compile(const StrategyInstance& s) { return detail::Compiler(s).run(); }

}  // namespace ral
