#pragma once

// Turns the honest protocol on a true formula into a probabilistic proof
// strategy: one randomized step per round on R_i, the predicate "if the
// round-i message agrees with the true polynomial at r, the round-i claim is
// correct". Goals: F (the formula), C_i (claim after round i), E_i (claim
// before round i).

#include "ral/protocol.hpp"
#include "ral/strategy.hpp"

namespace ral {

struct ExportOptions {
  std::optional<Rational> epsilon;  ///< defaults to the sum of the deltas
  std::uint64_t seed = 0;           ///< seed of the recorded honest run
};

struct TqbfExport {
  StrategyInstance strategy;
  ProtocolRun honest_run;
  Rational delta_sum;
};

inline TqbfExport export_strategy(const QbfFormula& f, unsigned k, const ExportOptions& opt = {}) {
  if (!brute_eval(f)) throw Error("export needs a true formula");
  Arithmetization ar(f, k);
  TqbfExport out;
  out.honest_run = run_protocol(ar, honest_prover(), opt.seed);
  if (!out.honest_run.accepted) throw Error("honest run was rejected");

  StrategyInstance& s = out.strategy;
  const std::size_t m = ar.rounds();
  const std::uint32_t q = ar.field().size();
  auto name = [](const char* p, std::size_t i) { return std::string(p) + std::to_string(i); };
  s.goal = Formula::goal("F");
  s.ground_truth.set_goal("F", true);
  for (std::size_t i = 1; i <= m; ++i) {
    s.ground_truth.set_goal(name("C", i), true);
    s.ground_truth.set_goal(name("E", i), true);
    // honest messages equal the true polynomials, so no challenge falsifies R_i
    s.ground_truth.define_by_falsifiers(name("R", i), k, {});
  }
  s.base_axioms.push_back(Formula::implies(Formula::goal("E1"), s.goal));
  for (std::size_t i = 1; i < m; ++i)
    s.base_axioms.push_back(Formula::implies(Formula::goal(name("E", i + 1)), Formula::goal(name("C", i))));
  if (m > 0) s.base_axioms.push_back(Formula::goal(name("C", m)));
  else s.base_axioms.push_back(s.goal);
  for (std::size_t i = 1; i <= m; ++i)
    for (std::uint32_t r = 0; r < q; ++r)
      s.base_axioms.push_back(
          Formula::implies(Formula::pred(name("R", i), bits_of(r, k)),
                           Formula::implies(Formula::goal(name("C", i)), Formula::goal(name("E", i)))));

  s.nodes.push_back(Leaf{s.goal});
  NodeId next = 0;
  out.delta_sum = 0;
  for (std::size_t i = m; i >= 1; --i) {
    RandomStep r;
    r.pred = name("R", i);
    r.length = k;
    r.delta = Rational(ar.effective_degree(i - 1), q);
    r.selector = ChildSelector::constant(next);
    out.delta_sum += r.delta;
    s.nodes.push_back(std::move(r));
    next = s.nodes.size() - 1;
  }
  s.root = next;
  s.epsilon = opt.epsilon.value_or(out.delta_sum);
  if (s.epsilon < out.delta_sum)
    throw Error("capital exceeded: epsilon " + to_string(s.epsilon) + " < sum of deltas " + to_string(out.delta_sum));
  s.options.entail.max_atoms = std::size_t{1} << 16;
  s.options.certificate_bound = 16;
  certify(s);
  return out;
}

}  // namespace ral
