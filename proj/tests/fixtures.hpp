#pragma once

#include "ral/strategy.hpp"

namespace ral::fixture {

/// One randomized step on R = "x != 11" (N = 2, delta = 1/4) followed by a
/// leaf claiming G; base axioms R(00)->G, R(01)->G, R(10)->G.
inline StrategyInstance e1(bool with_base = true) {
  StrategyInstance s;
  s.ground_truth.define_by_falsifiers("R", 2, {"11"});
  s.ground_truth.set_goal("G", true);
  s.goal = Formula::goal("G");
  s.epsilon = Rational(1, 4);
  if (with_base)
    for (const char* x : {"00", "01", "10"}) s.base_axioms.push_back(Formula::implies(Formula::pred("R", x), s.goal));
  s.nodes.push_back(Leaf{s.goal});
  RandomStep r;
  r.pred = "R";
  r.length = 2;
  r.delta = Rational(1, 4);
  r.selector = ChildSelector::constant(0);
  s.nodes.push_back(r);
  s.root = 1;
  certify(s);
  return s;
}

}  // namespace ral::fixture
