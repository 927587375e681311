#pragma once

// Finite-domain object logic: formulas over bitstring predicates and goal
// atoms, their s-expression syntax, and evaluation under an interpretation.

#include "ral/bits.hpp"
#include "ral/error.hpp"
#include "ral/rational.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ral {

enum class FormulaKind { Pred, Goal, Const, Not, And, Or, Implies, CountAtMost };

/// Immutable formula tree with shared structure. Copies are cheap.
class Formula {
 public:
  Formula() : Formula(constant(true)) {}

  static Formula pred(std::string name, std::string bits) {
    Node n;
    n.kind = FormulaKind::Pred;
    n.name = std::move(name);
    n.bits = std::move(bits);
    n.length = static_cast<unsigned>(n.bits.size());
    return Formula(std::move(n));
  }
  static Formula goal(std::string name) {
    Node n;
    n.kind = FormulaKind::Goal;
    n.name = std::move(name);
    return Formula(std::move(n));
  }
  static Formula constant(bool value) {
    Node n;
    n.kind = FormulaKind::Const;
    n.value = value;
    return Formula(std::move(n));
  }
  static Formula negate(Formula f) { return composite(FormulaKind::Not, {std::move(f)}); }
  static Formula implies(Formula a, Formula b) {
    return composite(FormulaKind::Implies, {std::move(a), std::move(b)});
  }
  /// n-ary conjunction exactly as given (no collapsing); needs >= 1 operand.
  static Formula conj(std::vector<Formula> fs) { return composite(FormulaKind::And, std::move(fs)); }
  static Formula disj(std::vector<Formula> fs) { return composite(FormulaKind::Or, std::move(fs)); }
  static Formula count_at_most(std::string name, unsigned length, Rational delta) {
    Node n;
    n.kind = FormulaKind::CountAtMost;
    n.name = std::move(name);
    n.length = length;
    n.delta = std::move(delta);
    return Formula(std::move(n));
  }

  /// Conjunction that collapses: {} -> true, {f} -> f.
  static Formula all_of(std::vector<Formula> fs) {
    if (fs.empty()) return constant(true);
    if (fs.size() == 1) return fs.front();
    return conj(std::move(fs));
  }
  /// Disjunction that collapses: {} -> false, {f} -> f.
  static Formula any_of(std::vector<Formula> fs) {
    if (fs.empty()) return constant(false);
    if (fs.size() == 1) return fs.front();
    return disj(std::move(fs));
  }

  FormulaKind kind() const { return node_->kind; }
  const std::string& name() const { return node_->name; }
  const std::string& bits() const { return node_->bits; }
  /// Predicate literal length for Pred, N for CountAtMost.
  unsigned length() const { return node_->length; }
  const Rational& delta() const { return node_->delta; }
  bool value() const { return node_->value; }
  const std::vector<Formula>& children() const { return node_->kids; }
  const void* identity() const { return node_.get(); }

  bool is_atom() const {
    auto k = kind();
    return k == FormulaKind::Pred || k == FormulaKind::Goal || k == FormulaKind::CountAtMost;
  }

  friend bool operator==(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return true;
    const Node& x = *a.node_;
    const Node& y = *b.node_;
    if (x.kind != y.kind || x.name != y.name || x.bits != y.bits || x.length != y.length ||
        x.value != y.value || x.delta != y.delta || x.kids.size() != y.kids.size())
      return false;
    for (std::size_t i = 0; i < x.kids.size(); ++i)
      if (!(x.kids[i] == y.kids[i])) return false;
    return true;
  }
  friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

  /// Canonical s-expression text.
  std::string str() const {
    std::string out;
    print(out);
    return out;
  }

  /// Symbol count: one per connective or constant, one per goal atom,
  /// 1 + N for a predicate atom over N bits, 3 for a counting statement.
  std::size_t size() const {
    switch (kind()) {
      case FormulaKind::Pred: return 1 + bits().size();
      case FormulaKind::Goal:
      case FormulaKind::Const: return 1;
      case FormulaKind::CountAtMost: return 3;
      default: break;
    }
    std::size_t s = 1;
    for (const auto& k : children()) s += k.size();
    return s;
  }

  std::size_t depth() const {
    std::size_t d = 0;
    for (const auto& k : children()) d = std::max(d, k.depth());
    return d + 1;
  }

 private:
  struct Node {
    FormulaKind kind = FormulaKind::Const;
    std::string name;
    std::string bits;
    unsigned length = 0;
    Rational delta;
    bool value = false;
    std::vector<Formula> kids;
  };

  explicit Formula(Node n) : node_(std::make_shared<const Node>(std::move(n))) {}

  static Formula composite(FormulaKind k, std::vector<Formula> kids) {
    if (kids.empty()) throw Error("connective needs at least one operand");
    Node n;
    n.kind = k;
    n.kids = std::move(kids);
    return Formula(std::move(n));
  }

  void print(std::string& out) const {
    switch (kind()) {
      case FormulaKind::Pred: out += "(pred " + name() + " " + bits() + ")"; return;
      case FormulaKind::Goal: out += "(goal " + name() + ")"; return;
      case FormulaKind::Const: out += value() ? "true" : "false"; return;
      case FormulaKind::CountAtMost:
        out += "(countatmost " + name() + " " + std::to_string(length()) + " " + to_string(delta()) + ")";
        return;
      case FormulaKind::Not: out += "(not"; break;
      case FormulaKind::And: out += "(and"; break;
      case FormulaKind::Or: out += "(or"; break;
      case FormulaKind::Implies: out += "(implies"; break;
    }
    for (const auto& k : children()) {
      out += ' ';
      k.print(out);
    }
    out += ')';
  }

  std::shared_ptr<const Node> node_;
};

/// Declared predicate lengths; goal names are free.
struct Signature {
  std::map<std::string, unsigned> predicates;
};

/// Conjunction-free right-nested chain h1 -> (h2 -> (... -> last)).
inline Formula implication_chain(const std::vector<Formula>& hyps, Formula last) {
  for (auto it = hyps.rbegin(); it != hyps.rend(); ++it) last = Formula::implies(*it, std::move(last));
  return last;
}

namespace detail {

class FormulaParser {
 public:
  FormulaParser(std::string_view text, const Signature& sig) : text_(text), sig_(sig) {}

  Formula parse_all() {
    Formula f = parse();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("trailing input", pos_);
    return f;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string word() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
           text_[pos_] != ')')
      ++pos_;
    if (start == pos_) throw ParseError("expected a word", start);
    return std::string(text_.substr(start, pos_ - start));
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c) throw ParseError(std::string("expected '") + c + "'", pos_);
    ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  unsigned declared_length(const std::string& name, std::size_t at) {
    auto it = sig_.predicates.find(name);
    if (it == sig_.predicates.end()) throw ParseError("undeclared predicate '" + name + "'", at);
    return it->second;
  }

  Formula parse() {
    skip_ws();
    std::size_t start = pos_;
    if (!peek('(')) {
      std::string w = word();
      if (w == "true") return Formula::constant(true);
      if (w == "false") return Formula::constant(false);
      throw ParseError("unexpected word '" + w + "'", start);
    }
    expect('(');
    std::size_t head_at = pos_;
    std::string head = word();
    Formula result;
    if (head == "pred") {
      std::size_t at = pos_;
      std::string name = word();
      std::size_t bits_at = pos_;
      std::string bits = word();
      if (!is_bitstring(bits)) throw ParseError("expected a 0/1 word", bits_at);
      unsigned len = declared_length(name, at);
      if (bits.size() != len)
        throw ParseError("predicate '" + name + "' takes " + std::to_string(len) + " bits, got " +
                             std::to_string(bits.size()),
                         bits_at);
      result = Formula::pred(std::move(name), std::move(bits));
    } else if (head == "goal") {
      result = Formula::goal(word());
    } else if (head == "countatmost") {
      std::size_t at = pos_;
      std::string name = word();
      std::size_t n_at = pos_;
      std::string n = word();
      if (n.empty() || n.size() > 6 || !std::all_of(n.begin(), n.end(), ::isdigit) || n == "0")
        throw ParseError("expected a positive length", n_at);
      unsigned len = static_cast<unsigned>(std::stoul(n));
      if (declared_length(name, at) != len)
        throw ParseError("counting statement length does not match predicate '" + name + "'", n_at);
      std::size_t d_at = pos_;
      std::string d = word();
      Rational delta;
      try {
        delta = parse_rational(d);
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), d_at);
      }
      if (delta < 0 || delta > 1) throw ParseError("delta must lie in [0,1]", d_at);
      result = Formula::count_at_most(std::move(name), len, std::move(delta));
    } else if (head == "not" || head == "and" || head == "or" || head == "implies") {
      std::vector<Formula> kids;
      while (!peek(')')) {
        if (pos_ >= text_.size()) throw ParseError("unterminated expression", pos_);
        kids.push_back(parse());
      }
      std::size_t want = head == "not" ? 1 : head == "implies" ? 2 : 0;
      if ((want && kids.size() != want) || kids.empty())
        throw ParseError("wrong operand count for '" + head + "'", head_at);
      if (head == "not") result = Formula::negate(kids[0]);
      else if (head == "implies") result = Formula::implies(kids[0], kids[1]);
      else if (head == "and") result = Formula::conj(std::move(kids));
      else result = Formula::disj(std::move(kids));
    } else {
      throw ParseError("unknown operator '" + head + "'", head_at);
    }
    expect(')');
    return result;
  }

  std::string_view text_;
  const Signature& sig_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Formula parse_formula(std::string_view text, const Signature& sig) {
  return detail::FormulaParser(text, sig).parse_all();
}

/// Ground-truth meaning of predicates and goal atoms.
class Interpretation {
 public:
  struct Predicate {
    unsigned length = 0;
    std::function<bool(std::string_view)> holds;
    /// Present when the predicate was defined by its falsifier set.
    std::optional<std::set<std::string>> falsifiers;
  };

  void define_predicate(const std::string& name, unsigned length, std::function<bool(std::string_view)> fn) {
    preds_[name] = Predicate{length, std::move(fn), std::nullopt};
  }

  /// R(x) is false exactly on `false_on`.
  void define_by_falsifiers(const std::string& name, unsigned length, std::set<std::string> false_on) {
    for (const auto& s : false_on)
      if (s.size() != length || !is_bitstring(s)) throw Error("falsifier '" + s + "' is not a " + std::to_string(length) + "-bit string");
    auto shared = std::make_shared<const std::set<std::string>>(false_on);
    preds_[name] = Predicate{length, [shared](std::string_view x) { return !shared->count(std::string(x)); },
                             std::move(false_on)};
  }

  void set_goal(const std::string& name, bool value) { goals_[name] = value; }

  const Predicate& predicate(const std::string& name) const {
    auto it = preds_.find(name);
    if (it == preds_.end()) throw Error("undeclared predicate '" + name + "'");
    return it->second;
  }
  bool goal(const std::string& name) const {
    auto it = goals_.find(name);
    if (it == goals_.end()) throw Error("undeclared goal '" + name + "'");
    return it->second;
  }
  bool has_predicate(const std::string& name) const { return preds_.count(name) != 0; }
  bool has_goal(const std::string& name) const { return goals_.count(name) != 0; }

  const std::map<std::string, Predicate>& predicates() const { return preds_; }
  const std::map<std::string, bool>& goals() const { return goals_; }

  Signature signature() const {
    Signature s;
    for (const auto& [name, p] : preds_) s.predicates[name] = p.length;
    return s;
  }

 private:
  std::map<std::string, Predicate> preds_;
  std::map<std::string, bool> goals_;
};

/// Number of N-bit strings on which `pred` is false.
inline std::uint64_t count_falsifiers(const Interpretation::Predicate& pred, unsigned length) {
  std::uint64_t k = 0;
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << length); ++v)
    if (!pred.holds(bits_of(v, length))) ++k;
  return k;
}

/// Standard semantics; counting statements are decided by enumerating all 2^N strings.
inline bool eval_formula(const Formula& f, const Interpretation& m) {
  switch (f.kind()) {
    case FormulaKind::Pred: {
      const auto& p = m.predicate(f.name());
      if (p.length != f.bits().size()) throw Error("arity mismatch for '" + f.name() + "'");
      return p.holds(f.bits());
    }
    case FormulaKind::Goal: return m.goal(f.name());
    case FormulaKind::Const: return f.value();
    case FormulaKind::Not: return !eval_formula(f.children()[0], m);
    case FormulaKind::And:
      for (const auto& k : f.children())
        if (!eval_formula(k, m)) return false;
      return true;
    case FormulaKind::Or:
      for (const auto& k : f.children())
        if (eval_formula(k, m)) return true;
      return false;
    case FormulaKind::Implies: return !eval_formula(f.children()[0], m) || eval_formula(f.children()[1], m);
    case FormulaKind::CountAtMost: {
      const auto& p = m.predicate(f.name());
      if (f.length() > 30) throw BudgetError("counting statement too large to enumerate");
      Rational k(count_falsifiers(p, f.length()));
      return k <= f.delta() * Rational(pow2(f.length()));
    }
  }
  return false;
}

/// Appends the distinct atoms (by canonical text) of f to `out`.
inline void collect_atoms(const Formula& f, std::map<std::string, Formula>& out) {
  if (f.is_atom()) {
    out.emplace(f.str(), f);
    return;
  }
  for (const auto& k : f.children()) collect_atoms(k, out);
}

}  // namespace ral
