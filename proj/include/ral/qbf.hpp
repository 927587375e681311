#pragma once

// Closed prenex quantified boolean formulas: AST, infix and QDIMACS readers,
// brute-force evaluation, and the exhaustive small-instance corpus.

#include "ral/error.hpp"
#include "ral/gf2k.hpp"

#include <cctype>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace ral {

enum class QKind { Var, Const, Not, And, Or };

class QExpr {
 public:
  struct Node {
    QKind kind = QKind::Const;
    unsigned var = 0;
    bool value = true;
    std::vector<QExpr> kids;
  };

  QExpr() : n_(std::make_shared<Node>()) {}

  static QExpr var(unsigned v) {
    Node n;
    n.kind = QKind::Var;
    n.var = v;
    return QExpr(std::move(n));
  }
  static QExpr constant(bool b) {
    Node n;
    n.value = b;
    return QExpr(std::move(n));
  }
  static QExpr negate(QExpr a) { return make(QKind::Not, {std::move(a)}); }
  static QExpr conj(std::vector<QExpr> k) { return make(QKind::And, std::move(k)); }
  static QExpr disj(std::vector<QExpr> k) { return make(QKind::Or, std::move(k)); }

  QKind kind() const { return n_->kind; }
  unsigned var_index() const { return n_->var; }
  bool value() const { return n_->value; }
  const std::vector<QExpr>& kids() const { return n_->kids; }

  /// Number of connectives, an n-ary and/or counting as n-1 binary ones.
  std::size_t connectives() const {
    std::size_t c = 0;
    if (kind() == QKind::Not) c = 1;
    if (kind() == QKind::And || kind() == QKind::Or) c = kids().size() - 1;
    for (const auto& k : kids()) c += k.connectives();
    return c;
  }

  bool eval(const std::vector<bool>& a) const {
    switch (kind()) {
      case QKind::Var: return a[var_index()];
      case QKind::Const: return value();
      case QKind::Not: return !kids()[0].eval(a);
      case QKind::And:
        for (const auto& k : kids())
          if (!k.eval(a)) return false;
        return true;
      case QKind::Or:
        for (const auto& k : kids())
          if (k.eval(a)) return true;
        return false;
    }
    return false;
  }

  /// Arithmetized value: not a -> 1+a, a and b -> ab, a or b -> a+b+ab.
  Elem arith(const Field& F, const std::vector<Elem>& a) const {
    switch (kind()) {
      case QKind::Var: return a[var_index()];
      case QKind::Const: return value() ? 1 : 0;
      case QKind::Not: return 1 ^ kids()[0].arith(F, a);
      case QKind::And: {
        Elem r = 1;
        for (const auto& k : kids()) r = F.mul(r, k.arith(F, a));
        return r;
      }
      case QKind::Or: {
        Elem r = 0;
        for (const auto& k : kids()) {
          Elem v = k.arith(F, a);
          r = r ^ v ^ F.mul(r, v);
        }
        return r;
      }
    }
    return 0;
  }

  /// Degree of the arithmetized matrix in each of `nvars` variables.
  std::vector<unsigned> degrees(std::size_t nvars) const {
    std::vector<unsigned> d(nvars, 0);
    switch (kind()) {
      case QKind::Var: d[var_index()] = 1; break;
      case QKind::Const: break;
      case QKind::Not: d = kids()[0].degrees(nvars); break;
      case QKind::And:
      case QKind::Or:
        for (const auto& k : kids()) {
          auto dk = k.degrees(nvars);
          for (std::size_t i = 0; i < nvars; ++i) d[i] += dk[i];
        }
        break;
    }
    return d;
  }

  std::string str(const std::vector<std::string>& names) const {
    switch (kind()) {
      case QKind::Var: return names[var_index()];
      case QKind::Const: return value() ? "true" : "false";
      default: break;
    }
    std::string s = kind() == QKind::Not ? "(not" : kind() == QKind::And ? "(and" : "(or";
    for (const auto& k : kids()) s += " " + k.str(names);
    return s + ")";
  }

 private:
  explicit QExpr(Node n) : n_(std::make_shared<Node>(std::move(n))) {}
  static QExpr make(QKind k, std::vector<QExpr> kids) {
    Node n;
    n.kind = k;
    n.kids = std::move(kids);
    return QExpr(std::move(n));
  }
  std::shared_ptr<const Node> n_;
};

struct Quantifier {
  bool forall = false;
  unsigned var = 0;
};

/// Variables are numbered in prefix order, outermost first.
struct QbfFormula {
  std::vector<std::string> names;
  std::vector<Quantifier> prefix;
  QExpr matrix;

  std::size_t num_vars() const { return names.size(); }

  std::string str() const {
    std::string open, close;
    for (const auto& q : prefix) {
      open += std::string("(") + (q.forall ? "forall " : "exists ") + names[q.var] + " ";
      close += ")";
    }
    return open + matrix.str(names) + close;
  }

  /// Same text with variables renamed x1..xn by position.
  std::string shape() const {
    QbfFormula g = *this;
    for (std::size_t i = 0; i < g.names.size(); ++i) g.names[i] = "x" + std::to_string(i + 1);
    return g.str();
  }
};

namespace detail {

class QbfParser {
 public:
  explicit QbfParser(std::string_view t) : t_(t) {}

  QbfFormula parse() {
    QbfFormula f;
    std::size_t opens = 0;
    for (;;) {
      skip();
      std::size_t save = i_;
      if (peek() != '(') break;
      ++i_;
      std::string w = word();
      if (w != "forall" && w != "exists") {
        i_ = save;
        break;
      }
      std::string v = word();
      if (v.empty()) fail("expected a variable name");
      if (index_.count(v)) fail("variable '" + v + "' bound twice");
      index_[v] = static_cast<unsigned>(f.names.size());
      f.prefix.push_back({w == "forall", static_cast<unsigned>(f.names.size())});
      f.names.push_back(v);
      ++opens;
    }
    f.matrix = expr();
    for (std::size_t k = 0; k < opens; ++k) expect(')');
    skip();
    if (i_ != t_.size()) fail("trailing input");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& m) const { throw ParseError(m + " at position " + std::to_string(i_), i_); }
  void skip() {
    while (i_ < t_.size() && std::isspace(static_cast<unsigned char>(t_[i_]))) ++i_;
  }
  char peek() {
    skip();
    return i_ < t_.size() ? t_[i_] : '\0';
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++i_;
  }
  std::string word() {
    skip();
    std::size_t b = i_;
    while (i_ < t_.size() && (std::isalnum(static_cast<unsigned char>(t_[i_])) || t_[i_] == '_')) ++i_;
    return std::string(t_.substr(b, i_ - b));
  }

  QExpr expr() {
    if (peek() == '(') {
      ++i_;
      std::string op = word();
      std::vector<QExpr> kids;
      while (peek() != ')') {
        if (peek() == '\0') fail("unterminated expression");
        kids.push_back(expr());
      }
      ++i_;
      if (op == "not") {
        if (kids.size() != 1) fail("not takes one operand");
        return QExpr::negate(kids[0]);
      }
      if (op == "and" || op == "or") {
        if (kids.empty()) fail(op + " needs operands");
        return op == "and" ? QExpr::conj(std::move(kids)) : QExpr::disj(std::move(kids));
      }
      if (op == "forall" || op == "exists") fail("quantifier inside the matrix (formula must be prenex)");
      fail("unknown connective '" + op + "'");
    }
    std::string w = word();
    if (w.empty()) fail("expected an expression");
    if (w == "true" || w == "false") return QExpr::constant(w == "true");
    auto it = index_.find(w);
    if (it == index_.end()) fail("free variable '" + w + "'");
    return QExpr::var(it->second);
  }

  std::string_view t_;
  std::size_t i_ = 0;
  std::map<std::string, unsigned> index_;
};

}  // namespace detail

inline QbfFormula parse_qbf_infix(std::string_view text) { return detail::QbfParser(text).parse(); }

/// QDIMACS prenex CNF. Variable n is named "v<n>".
inline QbfFormula parse_qdimacs(std::string_view text) {
  QbfFormula f;
  std::map<long, unsigned> index;
  std::vector<QExpr> clauses;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = false;
  long declared = 0;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& m) -> void {
    throw ParseError(m + " on line " + std::to_string(lineno), lineno);
  };
  std::vector<QExpr> current;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head) || head == "c") continue;
    if (head == "p") {
      std::string fmt;
      long nc = 0;
      if (!(ls >> fmt >> declared >> nc) || fmt != "cnf") fail("bad problem line");
      header = true;
      continue;
    }
    if (!header) fail("missing problem line");
    if (head == "a" || head == "e") {
      if (!clauses.empty() || !current.empty()) fail("quantifier line after clauses");
      long v;
      while (ls >> v && v != 0) {
        if (v < 0 || v > declared) fail("bad variable " + std::to_string(v));
        if (index.count(v)) fail("variable " + std::to_string(v) + " bound twice");
        index[v] = static_cast<unsigned>(f.names.size());
        f.prefix.push_back({head == "a", static_cast<unsigned>(f.names.size())});
        f.names.push_back("v" + std::to_string(v));
      }
      continue;
    }
    std::istringstream cs(line);
    long lit;
    while (cs >> lit) {
      if (lit == 0) {
        if (current.empty()) fail("empty clause");
        clauses.push_back(current.size() == 1 ? current[0] : QExpr::disj(current));
        current.clear();
        continue;
      }
      auto it = index.find(std::labs(lit));
      if (it == index.end()) fail("free variable " + std::to_string(std::labs(lit)));
      QExpr x = QExpr::var(it->second);
      current.push_back(lit < 0 ? QExpr::negate(x) : x);
    }
    if (cs.fail() && !cs.eof()) fail("bad clause line");
  }
  if (!current.empty()) throw ParseError("unterminated clause", lineno);
  if (!header) throw ParseError("missing problem line", lineno);
  f.matrix = clauses.empty() ? QExpr::constant(true) : clauses.size() == 1 ? clauses[0] : QExpr::conj(clauses);
  return f;
}

/// Infix when the text starts with '(' or a bare word, QDIMACS otherwise.
inline QbfFormula parse_qbf(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    if (text[i] == 'c' || text[i] == 'p') {
      // "c ..." comment or "p cnf"; bare variable names are not valid closed formulas
      if (i + 1 < text.size() && std::isspace(static_cast<unsigned char>(text[i + 1]))) return parse_qdimacs(text);
    }
    break;
  }
  return parse_qbf_infix(text);
}

inline bool brute_eval(const QbfFormula& f) {
  if (f.num_vars() > 24) throw Error("brute-force evaluation is limited to 24 variables");
  std::vector<bool> a(f.num_vars(), false);
  auto go = [&](auto& self, std::size_t i) -> bool {
    if (i == f.prefix.size()) return f.matrix.eval(a);
    unsigned v = f.prefix[i].var;
    a[v] = false;
    bool r0 = self(self, i + 1);
    if (f.prefix[i].forall ? !r0 : r0) return r0;
    a[v] = true;
    return self(self, i + 1);
  };
  return go(go, 0);
}

// --- corpus -----------------------------------------------------------------

/// All matrices over variables 0..nv-1 with exactly c binary/unary connectives.
inline std::vector<QExpr> matrices_with(unsigned nv, unsigned c) {
  if (c == 0) {
    std::vector<QExpr> out;
    for (unsigned v = 0; v < nv; ++v) out.push_back(QExpr::var(v));
    return out;
  }
  std::vector<QExpr> out;
  for (const auto& a : matrices_with(nv, c - 1)) out.push_back(QExpr::negate(a));
  for (unsigned left = 0; left + 1 <= c; ++left) {
    auto ls = matrices_with(nv, left);
    auto rs = matrices_with(nv, c - 1 - left);
    for (const auto& a : ls)
      for (const auto& b : rs) {
        out.push_back(QExpr::conj({a, b}));
        out.push_back(QExpr::disj({a, b}));
      }
  }
  return out;
}

/// Exhaustive corpus: 1..max_vars variables, every quantifier pattern over the
/// fixed order x1..xn, every matrix with at most max_connectives connectives.
inline std::vector<QbfFormula> exhaustive_qbf_corpus(unsigned max_vars = 3, unsigned max_connectives = 2) {
  std::vector<QbfFormula> out;
  for (unsigned nv = 1; nv <= max_vars; ++nv) {
    std::vector<QExpr> ms;
    for (unsigned c = 0; c <= max_connectives; ++c) {
      auto m = matrices_with(nv, c);
      ms.insert(ms.end(), m.begin(), m.end());
    }
    for (unsigned pat = 0; pat < (1u << nv); ++pat)
      for (const auto& m : ms) {
        QbfFormula f;
        for (unsigned v = 0; v < nv; ++v) {
          f.names.push_back("x" + std::to_string(v + 1));
          f.prefix.push_back({((pat >> (nv - 1 - v)) & 1) != 0, v});
        }
        f.matrix = m;
        out.push_back(std::move(f));
      }
  }
  return out;
}

/// Hand-picked larger instances (more connectives, up to 5 variables).
inline std::vector<QbfFormula> curated_qbf_corpus() {
  const char* texts[] = {
      "(forall x (exists y (and (or x y) (or (not x) y))))",
      "(forall x (exists y (and x (not x))))",
      "(exists x (and x (not x)))",
      "(forall x (or x (not x)))",
      "(forall x (exists y (or (and x (not y)) (and (not x) y))))",
      "(exists x (forall y (or (and x (not y)) (and (not x) y))))",
      "(forall a (forall b (exists c (and (or a b c) (or (not a) (not c)) (or (not b) (not c) a)))))",
      "(exists a (forall b (exists c (and (or a (not b) c) (or (not a) b (not c)) (or b c)))))",
      "(forall a (exists b (forall c (exists d (and (or a b) (or (not a) (not b)) (or c d) (or (not c) (not d)))))))",
      "(exists a (exists b (forall c (forall d (or (and a c) (and b d) (and (not a) (not b)))))))",
      "(forall p (exists q (forall r (exists s (exists t (and (or p q s) (or (not q) r t) (or (not r) (not s)) (or t (not p))))))))",
      "(forall p (forall q (exists r (and (or p q r) (or (not p) (not r)) (or (not q) (not r)) (or p q)))))",
  };
  std::vector<QbfFormula> out;
  for (const char* t : texts) out.push_back(parse_qbf_infix(t));
  return out;
}

}  // namespace ral
