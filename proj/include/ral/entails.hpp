#pragma once

// Bounded entailment oracle: propositional consequence with atoms treated as
// opaque variables, optionally strengthened by the counting closure that a
// true CountAtMost(R,N,delta) atom licenses over the R-atoms in the query.

#include "ral/formula.hpp"
#include "ral/sat.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace ral {

struct EntailOptions {
  std::size_t max_atoms = 20;
  bool counting_closure = true;
};

namespace detail {

class TseitinEncoder {
 public:
  explicit TseitinEncoder(sat::Solver& s) : s_(s) {}

  sat::Lit encode(const Formula& f) {
    auto memo = memo_.find(f.identity());
    if (memo != memo_.end()) return memo->second;
    sat::Lit out = encode_fresh(f);
    memo_.emplace(f.identity(), out);
    return out;
  }

  const std::map<std::string, std::pair<int, Formula>>& atoms() const { return atoms_; }

 private:
  sat::Lit encode_fresh(const Formula& f) {
    if (f.is_atom()) {
      auto key = f.str();
      auto it = atoms_.find(key);
      if (it == atoms_.end()) it = atoms_.emplace(key, std::pair{s_.new_var(), f}).first;
      return sat::pos(it->second.first);
    }
    switch (f.kind()) {
      case FormulaKind::Const: {
        if (true_var_ < 0) {
          true_var_ = s_.new_var();
          s_.add_clause({sat::pos(true_var_)});
        }
        return f.value() ? sat::pos(true_var_) : sat::neg(true_var_);
      }
      case FormulaKind::Not: return sat::negate(encode(f.children()[0]));
      case FormulaKind::Implies: {
        std::vector<sat::Lit> ls{sat::negate(encode(f.children()[0])), encode(f.children()[1])};
        return gate_or(ls);
      }
      case FormulaKind::Or: {
        std::vector<sat::Lit> ls;
        for (const auto& k : f.children()) ls.push_back(encode(k));
        return gate_or(ls);
      }
      case FormulaKind::And: {
        std::vector<sat::Lit> ls;
        for (const auto& k : f.children()) ls.push_back(sat::negate(encode(k)));
        return sat::negate(gate_or(ls));
      }
      default: break;
    }
    throw Error("unreachable formula kind");
  }

  sat::Lit gate_or(const std::vector<sat::Lit>& ls) {
    if (ls.size() == 1) return ls[0];
    int v = s_.new_var();
    std::vector<sat::Lit> big{sat::neg(v)};
    for (sat::Lit l : ls) {
      big.push_back(l);
      s_.add_clause({sat::pos(v), sat::negate(l)});
    }
    s_.add_clause(std::move(big));
    return sat::pos(v);
  }

  sat::Solver& s_;
  std::map<std::string, std::pair<int, Formula>> atoms_;
  std::unordered_map<const void*, sat::Lit> memo_;
  int true_var_ = -1;
};

/// Sound shortcut: forward chaining over atom facts and rules of the form
/// a1 -> (a2 -> ... -> b). False means "not derived this way", not "not entailed".
inline bool horn_derives(std::span<const Formula> axioms, const Formula& goal) {
  std::set<std::string> facts;
  std::vector<std::pair<std::vector<std::string>, std::string>> rules;
  auto as_rule = [](const Formula& f, std::vector<std::string>& body) -> std::optional<std::string> {
    const Formula* cur = &f;
    while (cur->kind() == FormulaKind::Implies) {
      const Formula& a = cur->children()[0];
      if (!a.is_atom()) return std::nullopt;
      body.push_back(a.str());
      cur = &cur->children()[1];
    }
    if (!cur->is_atom()) return std::nullopt;
    return cur->str();
  };
  for (const auto& a : axioms) {
    std::vector<std::string> body;
    auto head = as_rule(a, body);
    if (!head) continue;
    if (body.empty()) facts.insert(*head);
    else rules.emplace_back(std::move(body), std::move(*head));
  }
  std::vector<std::string> hyps;
  auto target = as_rule(goal, hyps);
  if (!target) return false;
  facts.insert(hyps.begin(), hyps.end());
  for (bool grew = true; grew && !facts.count(*target);) {
    grew = false;
    for (const auto& [body, head] : rules) {
      if (facts.count(head)) continue;
      if (std::all_of(body.begin(), body.end(), [&](const std::string& b) { return facts.count(b) != 0; })) {
        facts.insert(head);
        grew = true;
      }
    }
  }
  return facts.count(*target) != 0;
}

}  // namespace detail

/// Distinct atoms of a formula list (by canonical text).
inline std::size_t count_atoms(std::span<const Formula> fs) {
  std::map<std::string, Formula> atoms;
  for (const auto& f : fs) collect_atoms(f, atoms);
  return atoms.size();
}

/// True iff `f` follows from `axioms`. Throws BudgetError when the query has
/// more distinct atoms than `opt.max_atoms`.
inline bool entails(std::span<const Formula> axioms, const Formula& f, const EntailOptions& opt = {}) {
  std::map<std::string, Formula> atoms;
  for (const auto& a : axioms) collect_atoms(a, atoms);
  collect_atoms(f, atoms);
  if (atoms.size() > opt.max_atoms)
    throw BudgetError("entailment query has " + std::to_string(atoms.size()) + " atoms, bound is " +
                      std::to_string(opt.max_atoms));

  if (detail::horn_derives(axioms, f)) return true;

  sat::Solver s;
  detail::TseitinEncoder enc(s);
  for (const auto& a : axioms) s.add_clause({enc.encode(a)});
  s.add_clause({sat::negate(enc.encode(f))});

  if (opt.counting_closure) {
    const auto& vars = enc.atoms();
    for (const auto& [key, entry] : vars) {
      const Formula& c = entry.second;
      if (c.kind() != FormulaKind::CountAtMost) continue;
      std::vector<int> members;
      for (const auto& [k2, e2] : vars) {
        const Formula& a = e2.second;
        if (a.kind() == FormulaKind::Pred && a.name() == c.name() && a.bits().size() == c.length())
          members.push_back(e2.first);
      }
      auto bound = floor_nonneg(c.delta() * Rational(pow2(c.length())));
      if (BigInt(members.size()) > bound)
        s.add_at_most_false(sat::pos(entry.first), std::move(members), bound.convert_to<std::size_t>());
    }
  }
  return !s.solve();
}

inline bool entails(const std::vector<Formula>& axioms, const Formula& f, const EntailOptions& opt = {}) {
  return entails(std::span<const Formula>(axioms), f, opt);
}

/// Propositional consequence with every atom opaque (no counting closure).
inline bool tautological_consequence(std::span<const Formula> premises, const Formula& f,
                                     std::size_t max_atoms = 1u << 16) {
  return entails(premises, f, EntailOptions{max_atoms, false});
}

}  // namespace ral
