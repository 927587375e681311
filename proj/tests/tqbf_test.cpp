#include "ral/cheater.hpp"
#include "ral/compiler.hpp"
#include "ral/tqbf_export.hpp"

#include <gtest/gtest.h>

using namespace ral;

namespace {

// carry-less remainder of a by b over GF(2)
std::uint64_t gf2_mod(std::uint64_t a, std::uint64_t b) {
  int db = 63 - __builtin_clzll(b);
  while (a && 63 - __builtin_clzll(a) >= db) a ^= b << ((63 - __builtin_clzll(a)) - db);
  return a;
}

const char* kTwoVar = "(forall x (exists y (and (or x y) (or (not x) y))))";

}  // namespace

TEST(Field, ReductionPolynomialsIrreducible) {
  for (unsigned k = 2; k <= 16; ++k) {
    std::uint64_t p = irreducible_poly(k);
    ASSERT_EQ(63 - __builtin_clzll(p), static_cast<int>(k));
    for (std::uint64_t d = 2; d < (std::uint64_t{1} << (k / 2 + 1)); ++d) EXPECT_NE(gf2_mod(p, d), 0u) << k << " " << d;
  }
}

TEST(Field, Axioms) {
  for (unsigned k : {2u, 3u, 4u, 8u, 12u, 16u}) {
    Field F(k);
    Pcg32 rng(k, 1);
    for (int t = 0; t < 300; ++t) {
      Elem a = rng.value(k), b = rng.value(k), c = rng.value(k);
      EXPECT_EQ(F.mul(a, F.mul(b, c)), F.mul(F.mul(a, b), c));
      EXPECT_EQ(F.mul(a, b ^ c), F.mul(a, b) ^ F.mul(a, c));
      if (a) {
        EXPECT_EQ(F.mul(a, F.inv(a)), 1u);
      }
      EXPECT_EQ(F.mul(F.sqrt(a), F.sqrt(a)), a);
    }
    EXPECT_EQ(F.pow(2, F.size() - 1), 1u);
  }
}

TEST(Poly, InterpolationRoundTrip) {
  Field F(8);
  Pcg32 rng(3, 3);
  for (int t = 0; t < 50; ++t) {
    std::vector<Elem> c(1 + rng.below(6));
    for (auto& x : c) x = rng.value(8);
    Poly1 p(c);
    std::vector<Elem> xs, ys;
    for (Elem x = 10; x < 10 + c.size(); ++x) xs.push_back(x), ys.push_back(p.eval(F, x));
    Poly1 q = interpolate(F, xs, ys);
    EXPECT_EQ(q, p);
    for (Elem x = 0; x < 256; x += 17) EXPECT_EQ(q.eval(F, x), p.eval(F, x));
  }
  EXPECT_EQ(Poly1({3, 0, 0}).degree(), 0);
  EXPECT_EQ(Poly1().degree(), -1);
}

TEST(QbfParse, InfixAndQdimacsAgree) {
  auto a = parse_qbf(kTwoVar);
  EXPECT_EQ(a.num_vars(), 2u);
  auto b = parse_qbf("c example\np cnf 2 2\na 1 0\ne 2 0\n1 2 0\n-1 2 0\n");
  EXPECT_EQ(a.shape(), b.shape());
  EXPECT_EQ(brute_eval(a), brute_eval(b));
}

TEST(QbfParse, Errors) {
  EXPECT_THROW(parse_qbf("(forall x (and x y))"), ParseError);
  EXPECT_THROW(parse_qbf("(forall x (and x"), ParseError);
  EXPECT_THROW(parse_qbf("(forall x (forall x x))"), ParseError);
  EXPECT_THROW(parse_qbf("p cnf 2 1\na 1 0\n1 2 0\n"), ParseError);
  EXPECT_THROW(parse_qbf("(forall x (and x (exists y y)))"), ParseError);
}

TEST(QbfEval, Examples) {
  EXPECT_TRUE(brute_eval(parse_qbf(kTwoVar)));
  EXPECT_FALSE(brute_eval(parse_qbf("(exists x (and x (not x)))")));
  EXPECT_TRUE(brute_eval(parse_qbf("(forall x (or x (not x)))")));
}

TEST(QbfCorpus, Size) {
  auto c = exhaustive_qbf_corpus();
  EXPECT_EQ(c.size(), 2822u);
  std::size_t t = 0;
  for (const auto& f : c) t += brute_eval(f);
  EXPECT_GT(t, 0u);
  EXPECT_LT(t, c.size());
  for (const auto& f : curated_qbf_corpus()) EXPECT_GE(f.num_vars(), 1u);
}

TEST(Arithmetization, Examples) {
  Field F(4);
  auto f = parse_qbf("(forall x (forall y (or x y)))");
  EXPECT_EQ(f.matrix.arith(F, {1, 0}), 1u);
  auto g = parse_qbf("(exists x (and x (not x)))");
  EXPECT_EQ(g.matrix.arith(F, {0}), 0u);
  EXPECT_EQ(g.matrix.arith(F, {1}), 0u);
}

TEST(Arithmetization, BooleanAgreement) {
  Field F(8);
  for (const auto& f : exhaustive_qbf_corpus()) {
    std::size_t n = f.num_vars();
    for (std::uint32_t v = 0; v < (1u << n); ++v) {
      std::vector<bool> b(n);
      std::vector<Elem> e(n);
      for (std::size_t i = 0; i < n; ++i) {
        e[i] = (v >> i) & 1;
        b[i] = e[i] != 0;
      }
      ASSERT_EQ(f.matrix.arith(F, e), f.matrix.eval(b) ? 1u : 0u) << f.str();
    }
  }
  // one 16-variable matrix, all 2^16 points
  std::vector<QExpr> clauses;
  Pcg32 rng(16, 16);
  for (int c = 0; c < 20; ++c) {
    std::vector<QExpr> lits;
    for (int l = 0; l < 3; ++l) {
      QExpr x = QExpr::var(rng.below(16));
      lits.push_back(rng.below(2) ? QExpr::negate(x) : x);
    }
    clauses.push_back(QExpr::disj(lits));
  }
  QExpr m = QExpr::conj(clauses);
  for (std::uint32_t v = 0; v < (1u << 16); ++v) {
    std::vector<bool> b(16);
    std::vector<Elem> e(16);
    for (std::size_t i = 0; i < 16; ++i) {
        e[i] = (v >> i) & 1;
        b[i] = e[i] != 0;
      }
    ASSERT_EQ(m.arith(F, e), m.eval(b) ? 1u : 0u);
  }
}

TEST(Protocol, OperatorSequence) {
  auto ops = operator_sequence(parse_qbf(kTwoVar));
  ASSERT_EQ(ops.size(), 3u);
  EXPECT_EQ(ops[0].type, OpType::Forall);
  EXPECT_EQ(ops[1].type, OpType::Linearize);
  EXPECT_EQ(ops[2].type, OpType::Exists);
  EXPECT_EQ(operator_sequence(parse_qbf("(exists x (and x (not x)))")).size(), 1u);
}

TEST(Protocol, HonestFirstRound) {
  Arithmetization ar(parse_qbf("(forall x (or x (not x)))"), 4);
  std::vector<Elem> a(1, 0);
  Poly1 g = ar.round_poly(0, a);
  EXPECT_EQ(g.eval(ar.field(), 0), 1u);
  EXPECT_EQ(g.eval(ar.field(), 1), 1u);
  // interpolation consistency at fresh points
  for (Elem x = 2; x < 16; ++x) {
    a[0] = x;
    EXPECT_EQ(g.eval(ar.field(), x), ar.value(1, a));
  }
}

TEST(Protocol, ProductRoundClaim) {
  Field F(4);
  EXPECT_EQ(round_combine(F, OpType::Forall, Poly1({0, 1}).eval(F, 0), Poly1({0, 1}).eval(F, 1), 0), 0u);
}

TEST(Protocol, VerifierRejects) {
  Arithmetization ar(parse_qbf(kTwoVar), 8);
  Prover too_high = [](const ProverView& v) {
    Poly1 g = v.arith.round_poly(v.round, v.assignment);
    g.coeffs.resize(v.arith.effective_degree(v.round) + 2, 0);
    g.coeffs.back() = 1;
    return g;
  };
  auto r1 = run_protocol(ar, too_high, 1);
  EXPECT_FALSE(r1.accepted);
  EXPECT_FALSE(r1.rounds[0].degree_ok);
  Prover off = [](const ProverView& v) { return poly_add(v.arith.round_poly(v.round, v.assignment), Poly1({1})); };
  auto r2 = run_protocol(ar, off, 1);
  EXPECT_FALSE(r2.accepted);
  EXPECT_TRUE(r2.rounds[0].degree_ok);
  EXPECT_FALSE(r2.rounds[0].consistent);
}

TEST(Protocol, HonestCompleteness) {
  Arithmetization ar(parse_qbf(kTwoVar), 8);
  auto e = acceptance_rate(ar, honest_prover(), 1000, 42);
  EXPECT_EQ(e.accepted, 1000u);
}

TEST(Protocol, Deterministic) {
  Arithmetization ar(parse_qbf(kTwoVar), 8);
  auto a = run_protocol(ar, honest_prover(), 77), b = run_protocol(ar, honest_prover(), 77);
  ASSERT_EQ(a.rounds.size(), b.rounds.size());
  for (std::size_t i = 0; i < a.rounds.size(); ++i) EXPECT_EQ(a.rounds[i].challenge, b.rounds[i].challenge);
}

TEST(Protocol, AdversaryWithinBound) {
  for (const char* t : {"(forall x (exists y (and x (not x))))", "(exists x (forall y (or (and x (not y)) (and (not x) y))))"}) {
    auto f = parse_qbf(t);
    ASSERT_FALSE(brute_eval(f));
    Arithmetization ar(f, 4);
    auto e = acceptance_rate(ar, greedy_adversary(), 10000, 5);
    double bound = to_double(ar.soundness_bound());
    EXPECT_LE(e.rate, bound + 3 * std::sqrt(bound * (1 - std::min(bound, 1.0)) / 10000) + 1e-12) << t;
    EXPECT_GT(e.accepted, 0u) << t;
  }
}

TEST(Cheater, SingleRoundTinyField) {
  auto f = parse_qbf("(exists x (and x (not x)))");
  Arithmetization ar(f, 2);
  auto r = optimal_cheater_value(f, 2);
  EXPECT_LE(r.value, Rational(ar.effective_degree(0), 4));
  EXPECT_EQ(r.value, r.forward_value);
  EXPECT_GT(r.value, 0);
}

TEST(Cheater, TrueInstanceValueOne) {
  auto r = optimal_cheater_value(parse_qbf(kTwoVar), 3);
  EXPECT_EQ(r.value, Rational(1));
  EXPECT_EQ(r.forward, r.total);
}

TEST(Cheater, PolicyMonteCarlo) {
  auto f = parse_qbf("(forall x (exists y (and x (not x))))");
  Arithmetization ar(f, 3);
  OptimalCheater oc(ar);
  auto r = oc.solve();
  EXPECT_EQ(r.value, r.forward_value);
  EXPECT_LE(r.value, ar.soundness_bound());
  auto e = acceptance_rate(ar, oc.prover(), 20000, 9);
  double v = to_double(r.value);
  EXPECT_NEAR(e.rate, v, 4 * std::sqrt(v * (1 - v) / 20000) + 1e-9);
  // the greedy adversary can never beat the optimum
  auto g = acceptance_rate(ar, greedy_adversary(), 20000, 9);
  EXPECT_LE(g.rate, v + 4 * std::sqrt(v * (1 - v) / 20000) + 1e-9);
}

TEST(Export, ValidatesAndSucceeds) {
  auto x = export_strategy(parse_qbf(kTwoVar), 8);
  EXPECT_TRUE(validate(x.strategy).empty());
  Arithmetization ar(parse_qbf(kTwoVar), 8);
  EXPECT_EQ(x.delta_sum, Rational(ar.degree_sum(), 256));
  auto rep = mc_success_prob(x.strategy, 300, 1, 1);
  EXPECT_GE(rep.estimate + 3 * rep.std_error, 1 - to_double(x.delta_sum));
  // every accepted atom in a successful transcript is true
  auto t = run_sample(x.strategy, 3);
  EXPECT_TRUE(t.success);
  for (const auto& a : t.accepted) EXPECT_TRUE(eval_formula(a, x.strategy.ground_truth));
}

TEST(Export, CapitalCheck) {
  EXPECT_THROW(export_strategy(parse_qbf(kTwoVar), 8, {Rational(0), 0}), Error);
  EXPECT_THROW(export_strategy(parse_qbf("(exists x (and x (not x)))"), 8), Error);
}

TEST(Export, CompiledSizeGrowsWithField) {
  auto f = parse_qbf("(forall x (exists y (or x y)))");
  std::size_t prev = 0;
  for (unsigned k : {2u, 3u}) {
    auto x = export_strategy(f, k);
    auto c = compile(x.strategy);
    ASSERT_TRUE(c.proof);
    EXPECT_TRUE(check_proof(*c.proof, c.declared).accepted);
    EXPECT_GT(c.proof_size, prev);
    prev = c.proof_size;
  }
}
