#pragma once

// Randomized audit of the soundness property: a validated strategy whose
// exact success probability exceeds its capital only proves true goals, and
// the chance of ever accepting a false axiom never exceeds the capital.

#include "ral/generator.hpp"
#include "ral/strategy_io.hpp"

namespace ral {

struct SoundnessCase {
  std::uint64_t seed = 0;
  bool valid = false;
  Rational p;
  Rational bad;
  Rational epsilon;
  bool goal_true = false;
  bool counterexample = false;
  std::string detail;
};

struct SoundnessReport {
  std::uint64_t trials = 0;
  std::uint64_t valid = 0;
  std::uint64_t above_capital = 0;     ///< p > epsilon
  std::uint64_t false_goals = 0;
  std::uint64_t false_goal_positive = 0;  ///< false goal, yet p > 0
  std::vector<std::string> counterexamples;  ///< verbatim instance JSON + reason

  bool passed() const { return counterexamples.empty(); }
};

inline SoundnessCase audit_instance(const StrategyInstance& s) {
  SoundnessCase c;
  c.epsilon = s.epsilon;
  c.valid = validate(s).empty();
  if (!c.valid) return c;
  c.p = exact_success_prob(s);
  c.bad = bad_axiom_prob(s);
  c.goal_true = eval_formula(s.goal, s.ground_truth);
  if (c.p > s.epsilon && !c.goal_true) {
    c.counterexample = true;
    c.detail = "p = " + to_string(c.p) + " > epsilon but the goal is false";
  }
  if (c.bad > s.epsilon) {
    c.counterexample = true;
    c.detail += (c.detail.empty() ? "" : "; ") + std::string("bad-axiom probability ") + to_string(c.bad) +
                " exceeds epsilon";
  }
  return c;
}

inline SoundnessReport soundness_harness(const GeneratorConfig& cfg, std::uint64_t trials, std::uint64_t seed,
                                         unsigned jobs = 1) {
  auto cases = parallel_map<SoundnessCase>(trials, jobs, [&](std::size_t i) {
    std::uint64_t si = derive_seed(seed, i);
    auto s = generate_strategy(cfg, si);
    auto c = audit_instance(s);
    c.seed = si;
    if (c.counterexample) c.detail = to_json(s).dump() + " :: " + c.detail;
    return c;
  });
  SoundnessReport r;
  r.trials = trials;
  for (const auto& c : cases) {
    if (!c.valid) continue;
    ++r.valid;
    r.above_capital += c.p > c.epsilon;
    if (!c.goal_true) {
      ++r.false_goals;
      r.false_goal_positive += c.p > 0;
    }
    if (c.counterexample) r.counterexamples.push_back(c.detail);
  }
  return r;
}

}  // namespace ral
