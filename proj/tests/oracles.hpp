#pragma once

// Test-only reference implementations, deliberately independent of the
// library's solver-based code paths.

#include "ral/formula.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ral::oracle {

/// Truth-table entailment: enumerates every assignment of the atoms, keeps
/// those satisfying the axioms and (optionally) the counting closure, and
/// checks the conclusion on each.
class TruthTable {
 public:
  static bool entails(const std::vector<Formula>& axioms, const Formula& f, bool counting) {
    std::map<std::string, Formula> atoms;
    for (const auto& a : axioms) collect_atoms(a, atoms);
    collect_atoms(f, atoms);
    std::vector<std::string> keys;
    for (const auto& [k, _] : atoms) keys.push_back(k);
    std::size_t n = keys.size();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      std::map<std::string, bool> val;
      for (std::size_t i = 0; i < n; ++i) val[keys[i]] = (mask >> i) & 1u;
      if (counting && !closure_ok(atoms, val)) continue;
      bool all = true;
      for (const auto& a : axioms) all = all && eval(a, val);
      if (all && !eval(f, val)) return false;
    }
    return true;
  }

  static bool eval(const Formula& f, const std::map<std::string, bool>& val) {
    switch (f.kind()) {
      case FormulaKind::Pred:
      case FormulaKind::Goal:
      case FormulaKind::CountAtMost: return val.at(f.str());
      case FormulaKind::Const: return f.value();
      case FormulaKind::Not: return !eval(f.children()[0], val);
      case FormulaKind::And: {
        bool r = true;
        for (const auto& k : f.children()) r = r && eval(k, val);
        return r;
      }
      case FormulaKind::Or: {
        bool r = false;
        for (const auto& k : f.children()) r = r || eval(k, val);
        return r;
      }
      case FormulaKind::Implies: return !eval(f.children()[0], val) || eval(f.children()[1], val);
    }
    return false;
  }

 private:
  // every witness set S of appearing R-atoms with |S| > delta*2^N has a true member
  static bool closure_ok(const std::map<std::string, Formula>& atoms, const std::map<std::string, bool>& val) {
    for (const auto& [k, c] : atoms) {
      if (c.kind() != FormulaKind::CountAtMost || !val.at(k)) continue;
      std::vector<std::string> members;
      for (const auto& [k2, a] : atoms)
        if (a.kind() == FormulaKind::Pred && a.name() == c.name() && a.bits().size() == c.length())
          members.push_back(k2);
      for (std::uint64_t sub = 1; sub < (std::uint64_t{1} << members.size()); ++sub) {
        std::size_t size = 0;
        bool some_true = false;
        for (std::size_t i = 0; i < members.size(); ++i)
          if ((sub >> i) & 1u) {
            ++size;
            some_true = some_true || val.at(members[i]);
          }
        if (Rational(size) > c.delta() * Rational(pow2(c.length())) && !some_true) return false;
      }
    }
    return true;
  }
};

}  // namespace ral::oracle
