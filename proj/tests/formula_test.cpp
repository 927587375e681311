#include "oracles.hpp"
#include "ral/counting.hpp"
#include "ral/entails.hpp"
#include "ral/formula.hpp"
#include "ral/pcg32.hpp"
#include "ral/proof.hpp"

#include <gtest/gtest.h>

namespace ral {
namespace {

Signature sig_r(unsigned len) { return Signature{{{"R", len}}}; }

Interpretation neq11() {
  Interpretation m;
  m.define_predicate("R", 2, [](std::string_view x) { return x != "11"; });
  return m;
}

TEST(ParseFormula, ImplicationOfAtoms) {
  auto f = parse_formula("(implies (pred R 0101) (goal F))", sig_r(4));
  EXPECT_EQ(f, Formula::implies(Formula::pred("R", "0101"), Formula::goal("F")));
}

TEST(ParseFormula, CountingStatement) {
  auto f = parse_formula("(countatmost R 2 1/4)", sig_r(2));
  EXPECT_EQ(f, Formula::count_at_most("R", 2, Rational(1, 4)));
  EXPECT_EQ(f.str(), "(countatmost R 2 1/4)");
}

TEST(ParseFormula, ArityMismatchIsRejected) {
  EXPECT_THROW(parse_formula("(pred R 01)", sig_r(3)), ParseError);
  EXPECT_THROW(parse_formula("(countatmost R 2 1/4)", sig_r(3)), ParseError);
}

TEST(ParseFormula, SyntaxErrorsCarryPosition) {
  try {
    parse_formula("(and (goal A) (goal B)", sig_r(2));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 22u);
  }
  EXPECT_THROW(parse_formula("(bogus x)", sig_r(2)), ParseError);
  EXPECT_THROW(parse_formula("(pred Q 01)", sig_r(2)), ParseError);
  EXPECT_THROW(parse_formula("(countatmost R 2 3/2)", sig_r(2)), ParseError);
  EXPECT_THROW(parse_formula("(goal A) x", sig_r(2)), ParseError);
}

TEST(ParseFormula, RoundTripOnCorpus) {
  Signature sig{{{"R", 2}, {"S", 3}}};
  const char* corpus[] = {
      "true", "false", "(goal G)", "(pred S 010)", "(not (goal G))",
      "(and (goal A) (goal B) (pred R 11))", "(or (pred R 00) (pred R 01) (pred R 10))",
      "(implies (and (pred R 00) (countatmost R 2 1/4)) (or (goal F) (not (goal F))))",
      "(countatmost S 3 0)", "(countatmost S 3 1)", "(or (goal X))",
  };
  for (const char* text : corpus) {
    auto f = parse_formula(text, sig);
    EXPECT_EQ(f.str(), text);
    EXPECT_EQ(parse_formula(f.str(), sig), f);
  }
}

TEST(Formula, SizeAndDepth) {
  auto f = parse_formula("(implies (pred R 01) (goal G))", sig_r(2));
  EXPECT_EQ(f.size(), 1u + 3u + 1u);
  EXPECT_EQ(f.depth(), 2u);
}

TEST(EvalFormula, ExcludedMiddle) {
  Interpretation m;
  for (bool g : {false, true}) {
    m.set_goal("G", g);
    EXPECT_TRUE(eval_formula(Formula::disj({Formula::goal("G"), Formula::negate(Formula::goal("G"))}), m));
  }
}

TEST(EvalFormula, CountingStatementsByEnumeration) {
  auto m = neq11();
  EXPECT_TRUE(eval_formula(Formula::count_at_most("R", 2, Rational(1, 4)), m));
  EXPECT_FALSE(eval_formula(Formula::count_at_most("R", 2, Rational(0)), m));
}

TEST(EvalFormula, UndeclaredNameThrows) {
  Interpretation m;
  EXPECT_THROW(eval_formula(Formula::goal("G"), m), Error);
}

std::vector<Formula> e1_axioms() {
  auto g = Formula::goal("G");
  return {Formula::implies(Formula::pred("R", "00"), g), Formula::implies(Formula::pred("R", "01"), g),
          Formula::implies(Formula::pred("R", "10"), g), Formula::count_at_most("R", 2, Rational(1, 4))};
}

TEST(Entails, Basics) {
  auto f = Formula::goal("F");
  EXPECT_TRUE(entails(std::vector<Formula>{f}, f));
  EXPECT_FALSE(entails(std::vector<Formula>{}, Formula::goal("G")));
}

TEST(Entails, CountingClosureGivesThreeWayDisjunction) {
  auto ax = e1_axioms();
  EXPECT_TRUE(entails(ax, Formula::goal("G")));
  EXPECT_FALSE(entails(ax, Formula::goal("G"), EntailOptions{20, false}));
  // with delta = 3/4 up to three falsifiers are allowed: no closure
  ax[3] = Formula::count_at_most("R", 2, Rational(3, 4));
  EXPECT_FALSE(entails(ax, Formula::goal("G")));
}

TEST(Entails, AtomBound) {
  std::vector<Formula> ax;
  for (int i = 0; i < 21; ++i) ax.push_back(Formula::goal("A" + std::to_string(i)));
  EXPECT_THROW(entails(ax, Formula::goal("A0")), BudgetError);
  EXPECT_TRUE(entails(ax, Formula::goal("A0"), EntailOptions{21, true}));
}

ProofObject e1_proof(std::vector<std::string> witnesses) {
  auto g = Formula::goal("G");
  ProofObject p;
  p.lines.push_back({Rule::Axiom, e1_axioms()[0], {0}, {}});
  p.lines.push_back({Rule::Axiom, e1_axioms()[1], {1}, {}});
  p.lines.push_back({Rule::Axiom, e1_axioms()[2], {2}, {}});
  p.lines.push_back({Rule::Axiom, e1_axioms()[3], {3}, {}});
  p.lines.push_back({Rule::Counting, counting_conclusion("R", witnesses), {3}, witnesses});
  p.lines.push_back({Rule::Taut, g, {0, 1, 2, 4}, {}});
  return p;
}

TEST(CheckProof, AcceptsHandBuiltCountingProof) {
  auto res = check_proof(e1_proof({"00", "01", "10"}), e1_axioms());
  EXPECT_TRUE(res.accepted) << res.reason;
}

TEST(CheckProof, RejectsTooFewWitnesses) {
  auto res = check_proof(e1_proof({"00"}), e1_axioms());
  EXPECT_FALSE(res.accepted);
  EXPECT_EQ(res.line, 4u);
  EXPECT_NE(res.reason.find("bad witness count"), std::string::npos);
}

TEST(CheckProof, RejectsNonTautologicalStep) {
  ProofObject p;
  p.lines.push_back({Rule::Axiom, e1_axioms()[0], {0}, {}});
  p.lines.push_back({Rule::Taut, Formula::goal("G"), {0}, {}});
  auto res = check_proof(p, e1_axioms());
  EXPECT_FALSE(res.accepted);
  EXPECT_EQ(res.line, 1u);
  EXPECT_EQ(res.reason, "non-tautological step");
}

TEST(CheckProof, RejectsDanglingAndMismatchedLines) {
  ProofObject p;
  p.lines.push_back({Rule::Taut, Formula::goal("G"), {3}, {}});
  EXPECT_EQ(check_proof(p, e1_axioms()).reason, "dangling reference");
  p.lines = {{Rule::Axiom, Formula::goal("G"), {0}, {}}};
  EXPECT_FALSE(check_proof(p, e1_axioms()).accepted);
  p.lines = {{Rule::Axiom, e1_axioms()[0], {9}, {}}};
  EXPECT_FALSE(check_proof(p, e1_axioms()).accepted);
  EXPECT_FALSE(check_proof(ProofObject{}, e1_axioms()).accepted);
  auto dup = e1_proof({"00", "00", "10"});
  EXPECT_NE(check_proof(dup, e1_axioms()).reason.find("duplicate"), std::string::npos);
}

TEST(CheckProof, JsonRoundTrip) {
  auto p = e1_proof({"00", "01", "10"});
  auto j = to_json(p);
  ASSERT_TRUE(j.is_array());
  EXPECT_EQ(j[4]["rule"], "counting");
  auto q = proof_from_json(j, sig_r(2));
  EXPECT_EQ(to_json(q), j);
  EXPECT_TRUE(check_proof(q, e1_axioms()).accepted);
}

TEST(CountingCertificate, Examples) {
  auto m = neq11();
  auto c = counting_certificate("R", 2, Rational(1, 4), m);
  EXPECT_TRUE(c.certified);
  EXPECT_EQ(c.falsifiers, 1u);
  Interpretation always;
  always.define_predicate("R", 4, [](std::string_view) { return true; });
  auto c2 = counting_certificate("R", 4, Rational(0), always);
  EXPECT_TRUE(c2.certified);
  EXPECT_EQ(c2.falsifiers, 0u);
  auto c3 = counting_certificate("R", 2, Rational(0), m);
  EXPECT_FALSE(c3.certified);
  EXPECT_EQ(c3.falsifiers, 1u);
  Interpretation big;
  big.define_predicate("R", 21, [](std::string_view) { return true; });
  EXPECT_THROW(counting_certificate("R", 21, Rational(0), big), BudgetError);
}

// --- properties -------------------------------------------------------------

class RandomFormulas {
 public:
  explicit RandomFormulas(std::uint64_t seed) : rng_(seed, 7) {}

  Formula atom() {
    switch (rng_.below(4)) {
      case 0: return Formula::goal(rng_.below(2) ? "G" : "H");
      case 1: return Formula::count_at_most("R", 2, Rational(rng_.below(3), 4));
      default: return Formula::pred("R", bits_of(rng_.below(4), 2));
    }
  }

  Formula formula(int depth) {
    if (depth == 0 || rng_.below(3) == 0) return atom();
    switch (rng_.below(4)) {
      case 0: return Formula::negate(formula(depth - 1));
      case 1: return Formula::conj({formula(depth - 1), formula(depth - 1)});
      case 2: return Formula::disj({formula(depth - 1), formula(depth - 1)});
      default: return Formula::implies(formula(depth - 1), formula(depth - 1));
    }
  }

  Pcg32& rng() { return rng_; }

 private:
  Pcg32 rng_;
};

TEST(EntailsProperty, AgreesWithTruthTableOracle) {
  RandomFormulas gen(11);
  int positives = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    std::vector<Formula> ax;
    int n = 1 + static_cast<int>(gen.rng().below(4));
    for (int i = 0; i < n; ++i) ax.push_back(gen.formula(3));
    Formula f = gen.formula(2);
    for (bool counting : {false, true}) {
      bool expected = oracle::TruthTable::entails(ax, f, counting);
      positives += expected;
      ASSERT_EQ(entails(ax, f, EntailOptions{20, counting}), expected) << "trial " << trial;
    }
  }
  EXPECT_GT(positives, 100);
}

// All interpretations of R (2 bits) and goals G, H.
std::vector<Interpretation> all_interpretations() {
  std::vector<Interpretation> out;
  for (unsigned table = 0; table < 16; ++table)
    for (unsigned goals = 0; goals < 4; ++goals) {
      Interpretation m;
      std::set<std::string> f;
      for (unsigned x = 0; x < 4; ++x)
        if (!((table >> x) & 1u)) f.insert(bits_of(x, 2));
      m.define_by_falsifiers("R", 2, f);
      m.set_goal("G", goals & 1u);
      m.set_goal("H", goals & 2u);
      out.push_back(std::move(m));
    }
  return out;
}

TEST(KernelSoundness, AcceptedProofsAreTrueInEveryModelOfTheAxioms) {
  RandomFormulas gen(23);
  auto models = all_interpretations();
  int accepted = 0;
  for (int trial = 0; trial < 4000; ++trial) {
    std::vector<Formula> declared;
    for (int i = 0; i < 3; ++i) declared.push_back(gen.formula(2));
    if (gen.rng().below(2)) declared.push_back(Formula::count_at_most("R", 2, Rational(gen.rng().below(3), 4)));
    ProofObject p;
    for (std::size_t i = 0; i < declared.size(); ++i) p.lines.push_back({Rule::Axiom, declared[i], {i}, {}});
    int extra = 1 + static_cast<int>(gen.rng().below(3));
    for (int e = 0; e < extra; ++e) {
      std::size_t here = p.lines.size();
      if (declared.back().kind() == FormulaKind::CountAtMost && gen.rng().below(3) == 0) {
        std::vector<std::string> s;
        for (unsigned x = 0; x < 4; ++x)
          if (gen.rng().below(2)) s.push_back(bits_of(x, 2));
        if (s.empty()) s.push_back("00");
        p.lines.push_back({Rule::Counting, counting_conclusion("R", s), {declared.size() - 1}, s});
      } else {
        std::vector<std::size_t> refs;
        for (std::size_t r = 0; r < here; ++r)
          if (gen.rng().below(2)) refs.push_back(r);
        Formula concl = gen.rng().below(2) ? gen.formula(2) : Formula::disj({p.lines[here - 1].formula, gen.atom()});
        p.lines.push_back({Rule::Taut, concl, refs, {}});
      }
    }
    if (!check_proof(p, declared).accepted) continue;
    ++accepted;
    for (const auto& m : models) {
      bool axioms_true = true;
      for (const auto& a : declared) axioms_true = axioms_true && eval_formula(a, m);
      if (axioms_true) {
        ASSERT_TRUE(eval_formula(p.theorem(), m)) << to_json(p).dump();
      }
    }
  }
  EXPECT_GT(accepted, 200);
}

TEST(CountingRuleValidity, ExhaustiveSmallLengths) {
  for (unsigned n = 1; n <= 3; ++n) {
    unsigned strings = 1u << n;
    for (std::uint64_t table = 0; table < (std::uint64_t{1} << strings); ++table) {
      auto holds = [&](std::uint64_t x) { return ((table >> x) & 1u) != 0; };
      std::uint64_t falsifiers = 0;
      for (std::uint64_t x = 0; x < strings; ++x) falsifiers += !holds(x);
      for (unsigned num = 0; num <= strings; ++num) {
        Rational delta(num, strings);
        if (Rational(falsifiers) > delta * strings) continue;  // statement false
        for (std::uint64_t s = 1; s < (std::uint64_t{1} << strings); ++s) {
          if (!(Rational(__builtin_popcountll(s)) > delta * strings)) continue;
          bool some = false;
          for (std::uint64_t x = 0; x < strings; ++x)
            if ((s >> x) & 1u) some = some || holds(x);
          ASSERT_TRUE(some);
        }
      }
    }
  }
}

TEST(CountingRuleValidity, SampledUpToSixBits) {
  Pcg32 rng(5, 5);
  for (unsigned n = 4; n <= 6; ++n) {
    unsigned strings = 1u << n;
    for (int trial = 0; trial < 2000; ++trial) {
      std::set<std::string> falsifiers;
      unsigned target = rng.below(5);
      while (falsifiers.size() < target) falsifiers.insert(bits_of(rng.below(strings), n));
      Interpretation m;
      m.define_by_falsifiers("R", n, falsifiers);
      Rational delta(rng.below(strings + 1), strings);
      if (!eval_formula(Formula::count_at_most("R", n, delta), m)) continue;
      std::vector<std::string> s;
      for (unsigned x = 0; x < strings; ++x)
        if (rng.below(4) == 0) s.push_back(bits_of(x, n));
      if (!(Rational(s.size()) > delta * strings)) continue;
      ASSERT_TRUE(eval_formula(counting_conclusion("R", s), m));
    }
  }
}

}  // namespace
}  // namespace ral
