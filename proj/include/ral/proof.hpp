#pragma once

// Line-by-line checkable derivations. Three rules: cite a declared axiom,
// apply the counting rule to a CountAtMost line, or conclude a propositional
// tautological consequence of earlier lines.

#include "ral/entails.hpp"
#include "ral/formula.hpp"

#include <nlohmann/json.hpp>

#include <set>
#include <span>
#include <string>
#include <vector>

namespace ral {

enum class Rule { Axiom, Counting, Taut };

inline const char* rule_name(Rule r) {
  switch (r) {
    case Rule::Axiom: return "axiom";
    case Rule::Counting: return "counting";
    case Rule::Taut: return "taut";
  }
  return "?";
}

struct ProofLine {
  Rule rule = Rule::Taut;
  Formula formula;
  /// Axiom: {axiom index}. Counting: {source line}. Taut: cited lines.
  std::vector<std::size_t> refs;
  /// Counting only: the witness set S, in order.
  std::vector<std::string> witnesses;
};

struct ProofObject {
  std::vector<ProofLine> lines;

  const Formula& theorem() const { return lines.back().formula; }
  bool empty() const { return lines.empty(); }

  /// Total symbol count over all line formulas.
  std::size_t size() const {
    std::size_t s = 0;
    for (const auto& l : lines) s += l.formula.size();
    return s;
  }
};

/// The conclusion the counting rule draws from CountAtMost(R,N,delta) and S.
inline Formula counting_conclusion(const std::string& pred, const std::vector<std::string>& witnesses) {
  std::vector<Formula> ds;
  for (const auto& x : witnesses) ds.push_back(Formula::pred(pred, x));
  return Formula::any_of(std::move(ds));
}

struct CheckResult {
  bool accepted = true;
  std::string reason;
  std::size_t line = 0;

  explicit operator bool() const { return accepted; }
  static CheckResult accept() { return {}; }
  static CheckResult reject(std::string why, std::size_t at) { return {false, std::move(why), at}; }
};

struct CheckOptions {
  std::size_t max_atoms = 1u << 16;
};

inline CheckResult check_proof(const ProofObject& p, std::span<const Formula> declared,
                               const CheckOptions& opt = {}) {
  if (p.lines.empty()) return CheckResult::reject("empty proof", 0);
  for (std::size_t i = 0; i < p.lines.size(); ++i) {
    const ProofLine& l = p.lines[i];
    switch (l.rule) {
      case Rule::Axiom: {
        if (l.refs.size() != 1 || l.refs[0] >= declared.size())
          return CheckResult::reject("dangling axiom reference", i);
        if (declared[l.refs[0]] != l.formula) return CheckResult::reject("formula differs from cited axiom", i);
        break;
      }
      case Rule::Counting: {
        if (l.refs.size() != 1 || l.refs[0] >= i) return CheckResult::reject("dangling reference", i);
        const Formula& src = p.lines[l.refs[0]].formula;
        if (src.kind() != FormulaKind::CountAtMost)
          return CheckResult::reject("counting rule source is not a counting statement", i);
        std::set<std::string> seen;
        for (const auto& w : l.witnesses) {
          if (w.size() != src.length() || !is_bitstring(w))
            return CheckResult::reject("witness '" + w + "' has wrong length", i);
          if (!seen.insert(w).second) return CheckResult::reject("duplicate witness '" + w + "'", i);
        }
        if (!(Rational(l.witnesses.size()) > src.delta() * Rational(pow2(src.length()))))
          return CheckResult::reject("bad witness count: " + std::to_string(l.witnesses.size()) +
                                         " does not exceed " + to_string(src.delta() * Rational(pow2(src.length()))),
                                     i);
        if (counting_conclusion(src.name(), l.witnesses) != l.formula)
          return CheckResult::reject("counting rule conclusion mismatch", i);
        break;
      }
      case Rule::Taut: {
        std::vector<Formula> premises;
        for (auto r : l.refs) {
          if (r >= i) return CheckResult::reject("dangling reference", i);
          premises.push_back(p.lines[r].formula);
        }
        bool ok = false;
        try {
          ok = tautological_consequence(premises, l.formula, opt.max_atoms);
        } catch (const BudgetError& e) {
          return CheckResult::reject(e.what(), i);
        }
        if (!ok) return CheckResult::reject("non-tautological step", i);
        break;
      }
    }
  }
  return CheckResult::accept();
}

inline CheckResult check_proof(const ProofObject& p, const std::vector<Formula>& declared,
                               const CheckOptions& opt = {}) {
  return check_proof(p, std::span<const Formula>(declared), opt);
}

inline nlohmann::json to_json(const ProofObject& p) {
  auto arr = nlohmann::json::array();
  for (const auto& l : p.lines) {
    nlohmann::json j;
    j["rule"] = rule_name(l.rule);
    j["formula"] = l.formula.str();
    j["refs"] = l.refs;
    j["witnesses"] = l.witnesses;
    arr.push_back(std::move(j));
  }
  return arr;
}

inline ProofObject proof_from_json(const nlohmann::json& arr, const Signature& sig) {
  if (!arr.is_array()) throw Error("proof must be a JSON array of line records");
  ProofObject p;
  for (const auto& j : arr) {
    ProofLine l;
    std::string rule = j.at("rule").get<std::string>();
    if (rule == "axiom") l.rule = Rule::Axiom;
    else if (rule == "counting") l.rule = Rule::Counting;
    else if (rule == "taut") l.rule = Rule::Taut;
    else throw Error("unknown proof rule '" + rule + "'");
    l.formula = parse_formula(j.at("formula").get<std::string>(), sig);
    if (j.contains("refs")) l.refs = j["refs"].get<std::vector<std::size_t>>();
    if (j.contains("witnesses")) l.witnesses = j["witnesses"].get<std::vector<std::string>>();
    p.lines.push_back(std::move(l));
  }
  return p;
}

}  // namespace ral
