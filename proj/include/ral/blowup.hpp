#pragma once

// Proof-size blowup measurements on two parametric strategy families.
//   B_m: m chained randomized steps on always-true R_1..R_m (N = 2, delta = 1/16);
//        every son is strong, so the compiled proof has 4^m leaf proofs.
//   C_m: the same chain but only son 00 continues (delta = 1/8); the rest die.

#include "ral/compiler.hpp"

#include <cmath>

namespace ral {

enum class BlowupFamily { Full, Control };

inline std::string family_name(BlowupFamily f) { return f == BlowupFamily::Full ? "B" : "C"; }

inline BlowupFamily parse_family(const std::string& s) {
  if (s == "B" || s == "b" || s == "full") return BlowupFamily::Full;
  if (s == "C" || s == "c" || s == "control") return BlowupFamily::Control;
  throw Error("unknown family '" + s + "' (expected B or C)");
}

inline StrategyInstance family_instance(BlowupFamily fam, unsigned m) {
  const bool full = fam == BlowupFamily::Full;
  if (m > 8) throw Error("family depth is limited to 8");
  StrategyInstance s;
  s.goal = Formula::goal("G");
  s.ground_truth.set_goal("G", true);
  s.epsilon = full ? Rational(1, 2) : Rational(1);
  auto pname = [](unsigned i) { return "R" + std::to_string(i); };
  for (unsigned i = 1; i <= m; ++i) s.ground_truth.define_by_falsifiers(pname(i), 2, {});
  if (m == 0) {
    s.base_axioms.push_back(s.goal);
  } else if (full) {
    for (std::uint64_t v = 0; v < 4; ++v)
      s.base_axioms.push_back(Formula::implies(Formula::pred(pname(m), bits_of(v, 2)), s.goal));
  } else {
    s.base_axioms.push_back(Formula::implies(Formula::pred(pname(m), "00"), s.goal));
  }
  s.nodes.push_back(Leaf{s.goal});  // 0: the leaf reached at the bottom
  NodeId dead = 0;
  if (!full) {
    s.nodes.push_back(Leaf{s.goal});
    dead = 1;
  }
  NodeId next = 0;
  for (unsigned i = m; i >= 1; --i) {
    RandomStep r;
    r.pred = pname(i);
    r.length = 2;
    r.delta = full ? Rational(1, 16) : Rational(1, 8);
    if (full) {
      r.selector = ChildSelector::constant(next);
    } else {
      r.selector = ChildSelector::from_table({{"00", next}, {"01", dead}, {"10", dead}, {"11", dead}});
    }
    s.nodes.push_back(std::move(r));
    next = s.nodes.size() - 1;
  }
  s.root = next;
  certify(s);
  return s;
}

/// Max over root-to-leaf paths of the total size of the formulas on the path:
/// accepted atoms, inferred axioms with their justifications, the leaf goal,
/// and optionally each randomized step's counting certificate statement.
inline std::size_t probabilistic_complexity(const StrategyInstance& s, bool with_certificates) {
  std::vector<std::optional<std::size_t>> memo(s.nodes.size());
  std::function<std::size_t(NodeId)> go = [&](NodeId u) -> std::size_t {
    if (memo[u]) return *memo[u];
    std::size_t w = 0;
    const auto& n = s.node(u);
    if (const auto* l = std::get_if<Leaf>(&n)) {
      w = l->goal.size();
    } else if (const auto* inf = std::get_if<InferStep>(&n)) {
      w = inf->axiom.size() + inf->justification.size() + go(inf->child);
    } else {
      const auto& r = std::get<RandomStep>(n);
      std::size_t best = 0;
      for (NodeId c : r.selector.targets()) best = std::max(best, go(c));
      w = 1 + r.length + (with_certificates ? r.premise().size() : 0) + best;
    }
    memo[u] = w;
    return w;
  };
  return go(s.root);
}

struct BlowupRow {
  unsigned depth = 0;
  std::size_t prob_complexity = 0;        ///< without certificate sizes
  std::size_t prob_complexity_cert = 0;   ///< with certificate sizes
  std::size_t compiled_size = 0;
  std::size_t compiled_lines = 0;
  bool checked = false;                   ///< check_proof accepted
  double ratio = 0;                       ///< compiled_size / prob_complexity
  double ratio_cert = 0;
};

struct BlowupReport {
  BlowupFamily family = BlowupFamily::Full;
  std::vector<BlowupRow> rows;
  bool strictly_increasing = false;  ///< ratio over rows with depth >= 1
  double slope = 0;                  ///< least-squares fit of ln(ratio) against depth
  double intercept = 0;
  double r_squared = 0;
};

/// Least squares y = a + b x; returns {b, a, R^2}.
inline std::tuple<double, double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) return {0, y.empty() ? 0 : y[0], 0};
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i];
  double mx = sx / n, my = sy / n, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) return {0, my, 0};
  double b = sxy / sxx;
  double r2 = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return {b, my - b * mx, r2};
}

inline BlowupReport blowup_report(BlowupFamily fam, const std::vector<unsigned>& depths) {
  BlowupReport rep;
  rep.family = fam;
  for (unsigned m : depths) {
    auto s = family_instance(fam, m);
    auto c = compile(s);
    if (!c.proof) throw Error("family instance at depth " + std::to_string(m) + " did not compile: " + c.reason);
    BlowupRow row;
    row.depth = m;
    row.prob_complexity = probabilistic_complexity(s, false);
    row.prob_complexity_cert = probabilistic_complexity(s, true);
    row.compiled_size = c.proof_size;
    row.compiled_lines = c.proof->lines.size();
    row.checked = check_proof(*c.proof, c.declared).accepted && c.proof->theorem() == s.goal;
    row.ratio = static_cast<double>(row.compiled_size) / static_cast<double>(row.prob_complexity);
    row.ratio_cert = static_cast<double>(row.compiled_size) / static_cast<double>(row.prob_complexity_cert);
    rep.rows.push_back(row);
  }
  std::vector<double> xs, ys;
  rep.strictly_increasing = true;
  const BlowupRow* prev = nullptr;
  for (const auto& r : rep.rows) {
    if (r.depth == 0) continue;
    if (prev && !(r.ratio > prev->ratio)) rep.strictly_increasing = false;
    prev = &r;
    xs.push_back(r.depth);
    ys.push_back(std::log(r.ratio));
  }
  std::tie(rep.slope, rep.intercept, rep.r_squared) = linear_fit(xs, ys);
  return rep;
}

}  // namespace ral
