#pragma once

// Capital-metered proof strategies: randomized axiom steps that pay delta out
// of an initial capital epsilon, inference steps, and leaves claiming the goal.

#include "ral/counting.hpp"
#include "ral/entails.hpp"
#include "ral/formula.hpp"
#include "ral/parallel.hpp"
#include "ral/pcg32.hpp"
#include "ral/proof.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <type_traits>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace ral {

using NodeId = std::size_t;

/// Deterministic map from a sampled string to the next node.
struct ChildSelector {
  enum class Kind { Constant, Table };
  Kind kind = Kind::Constant;
  NodeId child = 0;
  std::map<std::string, NodeId> table;

  static ChildSelector constant(NodeId c) { return {Kind::Constant, c, {}}; }
  static ChildSelector from_table(std::map<std::string, NodeId> t) { return {Kind::Table, 0, std::move(t)}; }

  NodeId select(const std::string& r) const {
    if (kind == Kind::Constant) return child;
    auto it = table.find(r);
    if (it == table.end()) throw Error("child table has no entry for '" + r + "'");
    return it->second;
  }

  std::vector<NodeId> targets() const {
    if (kind == Kind::Constant) return {child};
    std::vector<NodeId> out;
    for (const auto& [_, c] : table) out.push_back(c);
    return out;
  }
};

struct InferStep {
  Formula axiom;
  ProofObject justification;  ///< from base axioms followed by the path's accepted formulas
  NodeId child = 0;
};

struct RandomStep {
  std::string pred;
  unsigned length = 0;
  Rational delta;
  std::optional<CountingCertificate> certificate;
  ChildSelector selector;

  Formula premise() const { return Formula::count_at_most(pred, length, delta); }
  Formula accepted(const std::string& r) const { return Formula::pred(pred, r); }
};

struct Leaf {
  Formula goal;
};

using StrategyNode = std::variant<InferStep, RandomStep, Leaf>;

struct EngineOptions {
  EntailOptions entail;
  std::uint64_t exact_budget = std::uint64_t{1} << 20;  ///< total outcome paths
  unsigned certificate_bound = 20;
};

struct StrategyInstance {
  std::vector<StrategyNode> nodes;
  NodeId root = 0;
  Rational epsilon;
  std::vector<Formula> base_axioms;
  Formula goal;
  Interpretation ground_truth;
  EngineOptions options;

  const StrategyNode& node(NodeId id) const { return nodes.at(id); }
};

/// Computes a certificate for every RandomStep by enumeration.
inline void certify(StrategyInstance& s) {
  for (auto& n : s.nodes)
    if (auto* r = std::get_if<RandomStep>(&n))
      r->certificate = counting_certificate(r->pred, r->length, r->delta, s.ground_truth, s.options.certificate_bound);
}

/// Counting statements of the certified randomized steps, in node order.
inline std::vector<Formula> counting_premises(const StrategyInstance& s) {
  std::vector<Formula> out;
  for (const auto& n : s.nodes) {
    const auto* r = std::get_if<RandomStep>(&n);
    if (!r || !r->certificate || !r->certificate->certified) continue;
    Formula p = r->premise();
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  }
  return out;
}

/// Axioms a compiled proof may cite: the base axioms, then the counting premises.
inline std::vector<Formula> declared_axioms(const StrategyInstance& s) {
  std::vector<Formula> out = s.base_axioms;
  for (auto& p : counting_premises(s))
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(std::move(p));
  return out;
}

/// Number of root-to-leaf outcome paths, saturating at `cap + 1`.
inline std::uint64_t count_outcomes(const StrategyInstance& s, std::uint64_t cap) {
  std::vector<std::optional<std::uint64_t>> memo(s.nodes.size());
  auto sat_add = [cap](std::uint64_t a, std::uint64_t b) { return std::min(cap + 1, a + b); };
  std::function<std::uint64_t(NodeId)> go = [&](NodeId u) -> std::uint64_t {
    if (memo[u]) return *memo[u];
    std::uint64_t r = 0;
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Leaf>) r = 1;
          else if constexpr (std::is_same_v<T, InferStep>) r = go(n.child);
          else {
            std::uint64_t outcomes = std::uint64_t{1} << n.length;
            if (n.selector.kind == ChildSelector::Kind::Constant) {
              std::uint64_t c = go(n.selector.child);
              r = (c != 0 && outcomes > (cap + 1) / c) ? cap + 1 : std::min(cap + 1, c * outcomes);
            } else {
              for (const auto& [_, c] : n.selector.table) r = sat_add(r, go(c));
            }
          }
        },
        s.node(u));
    memo[u] = r;
    return r;
  };
  return go(s.root);
}

// --- validation -------------------------------------------------------------

struct Violation {
  std::optional<NodeId> node;
  std::string rule;
  std::string detail;
};

namespace detail {

inline std::vector<NodeId> successors(const StrategyNode& n) {
  if (const auto* i = std::get_if<InferStep>(&n)) return {i->child};
  if (const auto* r = std::get_if<RandomStep>(&n)) return r->selector.targets();
  return {};
}

/// Topological order from the root, or nullopt on a cycle / dangling id.
inline std::optional<std::vector<NodeId>> topo_order(const StrategyInstance& s, std::vector<Violation>& out) {
  std::vector<int> color(s.nodes.size(), 0);
  std::vector<NodeId> order;
  bool ok = true;
  std::function<void(NodeId)> dfs = [&](NodeId u) {
    color[u] = 1;
    for (NodeId v : successors(s.node(u))) {
      if (v >= s.nodes.size()) {
        out.push_back({u, "structure", "child id " + std::to_string(v) + " out of range"});
        ok = false;
        continue;
      }
      if (color[v] == 1) {
        out.push_back({u, "structure", "cycle through node " + std::to_string(v)});
        ok = false;
      } else if (color[v] == 0) {
        dfs(v);
      }
    }
    color[u] = 2;
    order.push_back(u);
  };
  if (s.root >= s.nodes.size()) {
    out.push_back({std::nullopt, "structure", "root id out of range"});
    return std::nullopt;
  }
  dfs(s.root);
  if (!ok) return std::nullopt;
  std::reverse(order.begin(), order.end());
  return order;
}

inline bool has_infer_steps(const StrategyInstance& s) {
  for (const auto& n : s.nodes)
    if (std::holds_alternative<InferStep>(n)) return true;
  return false;
}

}  // namespace detail

inline std::vector<Violation> validate(const StrategyInstance& s) {
  std::vector<Violation> out;
  auto order = detail::topo_order(s, out);
  if (!order) return out;

  for (std::size_t i = 0; i < s.base_axioms.size(); ++i) {
    try {
      if (!eval_formula(s.base_axioms[i], s.ground_truth))
        out.push_back({std::nullopt, "base-axiom", "base axiom " + std::to_string(i) + " is false under ground truth"});
    } catch (const Error& e) {
      out.push_back({std::nullopt, "base-axiom", e.what()});
    }
  }
  try {
    eval_formula(s.goal, s.ground_truth);
  } catch (const Error& e) {
    out.push_back({std::nullopt, "goal", e.what()});
  }

  // largest capital spent on any path reaching each node
  std::vector<Rational> spent(s.nodes.size(), Rational(0));
  std::vector<bool> reached(s.nodes.size(), false);
  reached[s.root] = true;
  for (NodeId u : *order) {
    const auto& n = s.node(u);
    Rational after = spent[u];
    if (const auto* r = std::get_if<RandomStep>(&n)) {
      after += r->delta;
      if (r->delta < 0) out.push_back({u, "capital", "negative delta"});
      if (after > s.epsilon)
        out.push_back({u, "capital", "path spends " + to_string(after) + " > epsilon " + to_string(s.epsilon)});
      if (r->selector.kind == ChildSelector::Kind::Table) {
        if (r->length > 6) out.push_back({u, "selector", "explicit child tables are limited to N <= 6"});
        else
          for (std::uint64_t v = 0; v < (std::uint64_t{1} << r->length); ++v)
            if (!r->selector.table.count(bits_of(v, r->length)))
              out.push_back({u, "selector", "no child for '" + bits_of(v, r->length) + "'"});
      }
      if (!r->certificate) {
        out.push_back({u, "certificate", "randomized step lacks a counting certificate"});
      } else {
        try {
          auto fresh = counting_certificate(r->pred, r->length, r->delta, s.ground_truth, s.options.certificate_bound);
          if (!fresh.certified)
            out.push_back({u, "certificate", std::to_string(fresh.falsifiers) + " falsifiers exceed delta*2^N"});
          else if (fresh.falsifiers != r->certificate->falsifiers || r->certificate->pred != r->pred ||
                   r->certificate->length != r->length || r->certificate->delta != r->delta)
            out.push_back({u, "certificate", "certificate does not match the step"});
        } catch (const Error& e) {
          out.push_back({u, "certificate", e.what()});
        }
      }
    } else if (const auto* l = std::get_if<Leaf>(&n)) {
      if (l->goal != s.goal) out.push_back({u, "leaf-goal", "leaf claims " + l->goal.str() + ", not the goal"});
    } else if (const auto* inf = std::get_if<InferStep>(&n)) {
      if (inf->justification.empty() || inf->justification.theorem() != inf->axiom)
        out.push_back({u, "inference", "justification does not conclude the new axiom"});
    }
    for (NodeId v : detail::successors(n)) {
      if (!reached[v] || spent[v] < after) spent[v] = after;
      reached[v] = true;
    }
  }

  // inference justifications are checked against every accepted set reaching them
  if (detail::has_infer_steps(s)) {
    if (count_outcomes(s, s.options.exact_budget) > s.options.exact_budget) {
      out.push_back({std::nullopt, "budget", "too many outcome paths to check inference steps"});
      return out;
    }
    std::map<std::pair<NodeId, std::string>, bool> seen;
    std::function<void(NodeId, std::vector<Formula>&)> walk = [&](NodeId u, std::vector<Formula>& accepted) {
      std::string key;
      for (const auto& f : accepted) key += f.str() + ";";
      if (!seen.emplace(std::pair{u, key}, true).second) return;
      const auto& n = s.node(u);
      if (const auto* inf = std::get_if<InferStep>(&n)) {
        std::vector<Formula> declared = s.base_axioms;
        declared.insert(declared.end(), accepted.begin(), accepted.end());
        auto res = check_proof(inf->justification, declared);
        if (!res.accepted)
          out.push_back({u, "inference", "justification rejected at line " + std::to_string(res.line) + ": " + res.reason});
        accepted.push_back(inf->axiom);
        walk(inf->child, accepted);
        accepted.pop_back();
      } else if (const auto* r = std::get_if<RandomStep>(&n)) {
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << r->length); ++v) {
          std::string x = bits_of(v, r->length);
          accepted.push_back(r->accepted(x));
          walk(r->selector.select(x), accepted);
          accepted.pop_back();
        }
      }
    };
    if (out.empty()) {
      std::vector<Formula> acc;
      walk(s.root, acc);
    }
  }
  return out;
}

// --- sampling ---------------------------------------------------------------

struct TranscriptStep {
  NodeId node = 0;
  bool randomized = false;
  std::string sample;  ///< the sampled r on randomized steps
  Formula accepted;
  Rational rho;        ///< remaining capital after the step
};

struct Transcript {
  std::vector<TranscriptStep> steps;
  std::vector<Formula> accepted;
  NodeId leaf = 0;
  Rational final_rho;
  bool success = false;
};

/// Replays one run. The coins at a RandomStep come from
/// Pcg32(seed, FNV-1a of the node ids on the path including that step).
inline Transcript run_sample(const StrategyInstance& s, std::uint64_t seed) {
  Transcript t;
  Rational rho = s.epsilon;
  Fnv1a path;
  NodeId u = s.root;
  for (;;) {
    path.add(static_cast<std::uint64_t>(u));
    const auto& n = s.node(u);
    if (const auto* l = std::get_if<Leaf>(&n)) {
      std::vector<Formula> all = s.base_axioms;
      all.insert(all.end(), t.accepted.begin(), t.accepted.end());
      t.success = entails(all, l->goal, s.options.entail) && l->goal == s.goal;
      t.leaf = u;
      t.final_rho = rho;
      return t;
    }
    if (const auto* inf = std::get_if<InferStep>(&n)) {
      t.accepted.push_back(inf->axiom);
      t.steps.push_back({u, false, "", inf->axiom, rho});
      u = inf->child;
      continue;
    }
    const auto& r = std::get<RandomStep>(n);
    Pcg32 rng(seed, path.value());
    std::string x = rng.bits(r.length);
    rho -= r.delta;
    Formula a = r.accepted(x);
    t.accepted.push_back(a);
    t.steps.push_back({u, true, x, a, rho});
    u = r.selector.select(x);
  }
}

// --- exact evaluation -------------------------------------------------------

namespace detail {

inline std::string accepted_key(NodeId u, const std::vector<Formula>& accepted) {
  std::vector<std::string> parts;
  for (const auto& f : accepted) parts.push_back(f.str());
  std::sort(parts.begin(), parts.end());
  std::string key = std::to_string(u) + "|";
  for (const auto& p : parts) key += p + ";";
  return key;
}

inline void check_budget(const StrategyInstance& s) {
  if (count_outcomes(s, s.options.exact_budget) > s.options.exact_budget)
    throw BudgetError("strategy has more than " + std::to_string(s.options.exact_budget) +
                      " outcome paths; use Monte Carlo estimation");
}

}  // namespace detail

/// p(root) by backward induction: leaves score 0/1 by entailment, randomized
/// steps average their children over all 2^N strings.
inline Rational exact_success_prob(const StrategyInstance& s) {
  detail::check_budget(s);
  std::unordered_map<std::string, Rational> memo;
  std::vector<Formula> accepted;
  std::function<Rational(NodeId)> go = [&](NodeId u) -> Rational {
    std::string key = detail::accepted_key(u, accepted);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    Rational p;
    const auto& n = s.node(u);
    if (const auto* l = std::get_if<Leaf>(&n)) {
      std::vector<Formula> all = s.base_axioms;
      all.insert(all.end(), accepted.begin(), accepted.end());
      p = (l->goal == s.goal && entails(all, l->goal, s.options.entail)) ? 1 : 0;
    } else if (const auto* inf = std::get_if<InferStep>(&n)) {
      accepted.push_back(inf->axiom);
      p = go(inf->child);
      accepted.pop_back();
    } else {
      const auto& r = std::get<RandomStep>(n);
      Rational sum = 0;
      for (std::uint64_t v = 0; v < (std::uint64_t{1} << r.length); ++v) {
        std::string x = bits_of(v, r.length);
        accepted.push_back(r.accepted(x));
        sum += go(r.selector.select(x));
        accepted.pop_back();
      }
      p = sum / Rational(pow2(r.length));
    }
    memo.emplace(std::move(key), p);
    return p;
  };
  return go(s.root);
}

/// Exact probability that a run ever accepts a formula that is false under
/// the ground truth.
inline Rational bad_axiom_prob(const StrategyInstance& s) {
  detail::check_budget(s);
  std::vector<std::optional<Rational>> memo(s.nodes.size());
  std::function<Rational(NodeId)> go = [&](NodeId u) -> Rational {
    if (memo[u]) return *memo[u];
    Rational p = 0;
    const auto& n = s.node(u);
    if (const auto* inf = std::get_if<InferStep>(&n)) {
      p = eval_formula(inf->axiom, s.ground_truth) ? go(inf->child) : Rational(1);
    } else if (const auto* r = std::get_if<RandomStep>(&n)) {
      const auto& pred = s.ground_truth.predicate(r->pred);
      Rational sum = 0;
      for (std::uint64_t v = 0; v < (std::uint64_t{1} << r->length); ++v) {
        std::string x = bits_of(v, r->length);
        sum += pred.holds(x) ? go(r->selector.select(x)) : Rational(1);
      }
      p = sum / Rational(pow2(r->length));
    }
    memo[u] = p;
    return p;
  };
  return go(s.root);
}

// --- Monte Carlo ------------------------------------------------------------

struct ProbReport {
  std::optional<Rational> exact;
  std::uint64_t samples = 0;
  std::uint64_t successes = 0;
  double estimate = 0;
  double confidence = 0.99;
  double half_width = 0;  ///< two-sided Chernoff-Hoeffding half-width at `confidence`
  double std_error = 0;   ///< sqrt(p(1-p)/n) at the estimate
};

/// Hoeffding half-width sqrt(ln(2/(1-conf)) / (2n)).
inline double chernoff_half_width(std::uint64_t n, double confidence) {
  return std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * static_cast<double>(n)));
}

/// Sample i runs with derive_seed(seed, i); the count is independent of `jobs`.
inline ProbReport mc_success_prob(const StrategyInstance& s, std::uint64_t samples, std::uint64_t seed,
                                  unsigned jobs = 1) {
  if (samples == 0) throw Error("need at least one sample");
  unsigned chunks = std::max(1u, jobs);
  auto counts = parallel_map<std::uint64_t>(chunks, jobs, [&](std::size_t c) {
    std::uint64_t succ = 0;
    for (std::uint64_t i = c; i < samples; i += chunks) succ += run_sample(s, derive_seed(seed, i)).success;
    return succ;
  });
  ProbReport rep;
  rep.samples = samples;
  for (auto c : counts) rep.successes += c;
  rep.estimate = static_cast<double>(rep.successes) / static_cast<double>(samples);
  rep.half_width = chernoff_half_width(samples, rep.confidence);
  rep.std_error = std::sqrt(rep.estimate * (1 - rep.estimate) / static_cast<double>(samples));
  return rep;
}

}  // namespace ral
