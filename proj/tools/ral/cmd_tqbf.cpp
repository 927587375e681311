// tqbf subcommands.

#include "cli.hpp"

#include "ral/cheater.hpp"
#include "ral/strategy_io.hpp"
#include "ral/tqbf_export.hpp"

namespace ral::cli {

namespace {

std::string in_path, formula_text;

QbfFormula load_formula() {
  if (in_path.empty() == formula_text.empty()) throw UsageError("give exactly one of --in and --formula");
  std::string text = formula_text.empty() ? read_file(in_path) : formula_text;
  return load(formula_text.empty() ? in_path : "formula", [&] { return parse_qbf(text); });
}

void add_input(CLI::App* sub) {
  sub->add_option("--in", in_path, "QDIMACS or prefix-form formula file");
  sub->add_option("--formula", formula_text, "formula text");
}

Json record_json(const RoundRecord& r) {
  Json j;
  j["round"] = r.round;
  j["type"] = op_name(r.type);
  j["var"] = r.var;
  j["message"] = r.message.coeffs;
  j["claim_before"] = r.claim_before;
  j["degree_ok"] = r.degree_ok;
  j["consistent"] = r.consistent;
  if (r.consistent) {
    j["challenge"] = r.challenge;
    j["claim_after"] = r.claim_after;
  }
  return j;
}

std::string transcript_lines(const ProtocolRun& run) {
  std::string out;
  for (const auto& r : run.rounds) out += record_json(r).dump() + "\n";
  return out;
}

}  // namespace

void register_tqbf(CLI::App& app, Context& ctx) {
  auto* tq = app.add_subcommand("tqbf", "quantified boolean formulas and the interactive protocol");
  static unsigned k = 8;
  static std::uint64_t seeds = 1, cheat_seeds = 10000;
  static std::string transcript, adversary = "greedy", out, epsilon;
  static std::uint64_t budget = OptimalCheater::kDefaultBudget;

  auto* eval = leaf(tq, ctx, "eval", "evaluate by exhaustive expansion", false, [] {
    auto f = load_formula();
    Report r;
    bool v = brute_eval(f);
    r.result["value"] = v;
    r.result["variables"] = f.num_vars();
    r.result["formula"] = f.str();
    r.text = {v ? "true" : "false"};
    return r;
  });
  add_input(eval);

  auto* prove = leaf(tq, ctx, "prove", "run the honest prover", true, [&ctx] {
    auto f = load_formula();
    Arithmetization ar(f, k);
    auto run = run_protocol(ar, honest_prover(), ctx.common.seed);
    Report r;
    r.result["accepted"] = run.accepted;
    r.result["rounds"] = ar.rounds();
    r.result["degree_sum"] = ar.degree_sum();
    if (run.rejected_at) r.result["rejected_at"] = *run.rejected_at;
    bool all = run.accepted;
    if (seeds > 1) {
      auto est = acceptance_rate(ar, honest_prover(), seeds, ctx.common.seed, ctx.common.jobs);
      r.result["seeds"] = est.seeds;
      r.result["accepted_seeds"] = est.accepted;
      r.result["rate"] = est.rate;
      all = est.accepted == est.seeds;
    }
    std::string lines = transcript_lines(run);
    if (!transcript.empty()) {
      write_file(transcript, lines);
      r.result["transcript"] = transcript;
    } else {
      Json recs = Json::array();
      for (const auto& rec : run.rounds) recs.push_back(record_json(rec));
      r.result["transcript"] = recs;
    }
    r.text = {all ? "accept" : "reject"};
    r.exit_code = all ? 0 : 1;
    return r;
  });
  add_input(prove);
  prove->add_option("--k", k, "field GF(2^k)")->check(CLI::Range(2u, 16u));
  prove->add_option("--seeds", seeds, "also measure acceptance over this many seeds")->check(CLI::PositiveNumber);
  prove->add_option("--transcript", transcript, "write JSON-lines round records here");

  auto* cheat = leaf(tq, ctx, "cheat", "measure a cheating prover against the soundness bound", true, [&ctx] {
    auto f = load_formula();
    bool truth = brute_eval(f);
    Arithmetization ar(f, k);
    Report r;
    double bound = to_double(ar.soundness_bound());
    r.result["formula_true"] = truth;
    r.result["k"] = k;
    r.result["degree_sum"] = ar.degree_sum();
    r.result["bound"] = bound;
    Prover p;
    std::optional<OptimalCheater> oc;
    if (adversary == "optimal") {
      if (k > 4) throw UsageError("the optimal adversary needs --k <= 4");
      try {
        oc.emplace(ar, budget);
      } catch (const BudgetError& e) {
        throw UsageError(e.what());
      }
      auto res = oc->solve();
      r.result["optimal_value"] = to_string(res.value);
      r.result["optimal_accepting"] = res.accepting;
      r.result["challenge_sequences"] = res.total;
      r.result["policy_replay"] = to_string(res.forward_value);
      p = oc->prover();
    } else {
      p = greedy_adversary();
    }
    auto est = acceptance_rate(ar, p, cheat_seeds, ctx.common.seed, ctx.common.jobs);
    double sd = std::sqrt(bound * (1 - std::min(bound, 1.0)) / static_cast<double>(cheat_seeds));
    double tol = bound + 3 * sd;
    r.result["seeds"] = est.seeds;
    r.result["accepted"] = est.accepted;
    r.result["rate"] = est.rate;
    r.result["tolerance"] = tol;
    bool ok = truth || est.rate <= tol;
    r.result["within_bound"] = ok;
    std::ostringstream t;
    t << "rate " << est.rate << " bound " << bound << (ok ? " ok" : " VIOLATION");
    r.text = {t.str()};
    r.exit_code = ok ? 0 : 1;
    return r;
  });
  add_input(cheat);
  cheat->add_option("--k", k, "field GF(2^k)")->check(CLI::Range(2u, 16u));
  cheat->add_option("--seeds", cheat_seeds, "protocol runs")->check(CLI::PositiveNumber);
  cheat->add_option("--adversary", adversary, "greedy or optimal")->check(CLI::IsMember({"greedy", "optimal"}));
  cheat->add_option("--budget", budget, "work budget of the optimal adversary");

  auto* exp = leaf(tq, ctx, "export", "export the honest protocol as a proof strategy", true, [&ctx] {
    auto f = load_formula();
    ExportOptions opt;
    opt.seed = ctx.common.seed;
    if (!epsilon.empty()) opt.epsilon = load("epsilon", [] { return parse_rational(epsilon); });
    auto e = load("export", [&] { return export_strategy(f, k, opt); });
    auto vs = validate(e.strategy);
    Report r;
    r.result["rounds"] = e.honest_run.rounds.size();
    r.result["delta_sum"] = to_string(e.delta_sum);
    r.result["epsilon"] = to_string(e.strategy.epsilon);
    r.result["valid"] = vs.empty();
    std::string body = to_json(e.strategy).dump(2) + "\n";
    if (!out.empty()) {
      write_file(out, body);
      r.result["strategy"] = out;
    } else {
      r.result["strategy"] = Json(to_json(e.strategy));
    }
    r.text = {vs.empty() ? "exported " + std::to_string(e.honest_run.rounds.size()) + " rounds" : "invalid export"};
    r.exit_code = vs.empty() ? 0 : 1;
    return r;
  });
  add_input(exp);
  exp->add_option("--k", k, "field GF(2^k)")->check(CLI::Range(2u, 16u));
  exp->add_option("--epsilon", epsilon, "capital (default: sum of deltas)");
  exp->add_option("--out", out, "write the strategy JSON here");
}

}  // namespace ral::cli
