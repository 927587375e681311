// proof, strategy and compile subcommands.

#include "cli.hpp"

#include "ral/blowup.hpp"
#include "ral/compiler.hpp"
#include "ral/soundness.hpp"
#include "ral/strategy_io.hpp"

#include <algorithm>

namespace ral::cli {

namespace {

StrategyInstance load_instance(const std::string& path) {
  auto text = read_file(path);
  return load(path, [&] { return strategy_from_json(nlohmann::json::parse(text)); });
}

Json violations_json(const std::vector<Violation>& vs) {
  Json arr = Json::array();
  for (const auto& v : vs) {
    Json j;
    j["node"] = v.node ? Json(*v.node) : Json(nullptr);
    j["rule"] = v.rule;
    j["detail"] = v.detail;
    arr.push_back(std::move(j));
  }
  return arr;
}

std::vector<std::string> violation_lines(const std::vector<Violation>& vs) {
  std::vector<std::string> out;
  for (const auto& v : vs)
    out.push_back((v.node ? "node " + std::to_string(*v.node) : std::string("instance")) + ": " + v.rule + ": " +
                  v.detail);
  return out;
}

/// Report for an instance that failed validation.
Report invalid(const std::vector<Violation>& vs) {
  Report r;
  r.result["valid"] = false;
  r.result["violations"] = violations_json(vs);
  r.text = violation_lines(vs);
  r.exit_code = 1;
  return r;
}

/// Largest number of steps on a root-to-leaf path.
unsigned strategy_depth(const StrategyInstance& s) {
  std::map<NodeId, unsigned> memo;
  std::function<unsigned(NodeId)> go = [&](NodeId u) -> unsigned {
    if (auto it = memo.find(u); it != memo.end()) return it->second;
    unsigned d = 0;
    const auto& n = s.nodes[u];
    if (const auto* i = std::get_if<InferStep>(&n)) d = 1 + go(i->child);
    if (const auto* r = std::get_if<RandomStep>(&n))
      for (NodeId c : r->selector.targets()) d = std::max(d, 1 + go(c));
    return memo[u] = d;
  };
  return go(s.root);
}

Json proof_bundle(const StrategyInstance& s, const CompileResult& c) {
  Json b;
  Json preds = Json::object();
  for (const auto& [name, len] : s.ground_truth.signature().predicates) preds[name] = len;
  b["predicates"] = preds;
  Json decl = Json::array();
  for (const auto& f : c.declared) decl.push_back(f.str());
  b["declared"] = decl;
  b["goal"] = s.goal.str();
  b["lines"] = Json(to_json(*c.proof));
  return b;
}

}  // namespace

void register_proof(CLI::App& app, Context& ctx) {
  auto* proof = app.add_subcommand("proof", "proof objects");
  static std::string in;
  auto* check = leaf(proof, ctx, "check", "check a proof bundle line by line", false, [] {
    auto text = read_file(in);
    Json b = parse_json(text, in);
    Signature sig;
    std::vector<Formula> declared;
    ProofObject p;
    std::optional<Formula> goal;
    load(in, [&] {
      if (b.contains("predicates"))
        for (const auto& [name, len] : b["predicates"].items()) sig.predicates[name] = len.get<unsigned>();
      for (const auto& f : b.at("declared")) declared.push_back(parse_formula(f.get<std::string>(), sig));
      p = proof_from_json(nlohmann::json::parse(b.at("lines").dump()), sig);
      if (b.contains("goal")) goal = parse_formula(b["goal"].get<std::string>(), sig);
      return 0;
    });
    Report r;
    auto res = check_proof(p, declared);
    bool ok = res.accepted;
    std::string reason = res.reason;
    if (ok && goal && p.theorem() != *goal) {
      ok = false;
      reason = "theorem differs from goal";
      res.line = p.lines.size() - 1;
    }
    r.result["accepted"] = ok;
    if (!ok) {
      r.result["line"] = res.line;
      r.result["reason"] = reason;
    }
    r.result["lines"] = p.lines.size();
    r.result["size"] = p.size();
    if (!p.empty()) r.result["theorem"] = p.theorem().str();
    r.text = {ok ? "accept" : "reject at line " + std::to_string(res.line) + ": " + reason};
    r.exit_code = ok ? 0 : 1;
    return r;
  });
  check->add_option("--in", in, "proof bundle (JSON)")->required();
}

void register_strategy(CLI::App& app, Context& ctx) {
  auto* st = app.add_subcommand("strategy", "probabilistic proof strategies");
  static std::string in, transcript;
  static std::uint64_t samples = 10000, trials = 10000;
  static double confidence = 0.99;
  static unsigned max_length = 6, max_depth = 3;
  static std::string dir;

  auto* validate_cmd = leaf(st, ctx, "validate", "check structural and capital rules", false, [] {
    auto s = load_instance(in);
    auto vs = validate(s);
    if (!vs.empty()) return invalid(vs);
    Report r;
    r.result["valid"] = true;
    r.result["violations"] = Json::array();
    r.result["nodes"] = s.nodes.size();
    r.result["depth"] = strategy_depth(s);
    r.text = {"valid"};
    return r;
  });
  validate_cmd->add_option("--in", in, "strategy file (JSON)")->required();

  auto* run = leaf(st, ctx, "run", "sample one run", true, [&ctx] {
    auto s = load_instance(in);
    if (auto vs = validate(s); !vs.empty()) return invalid(vs);
    auto t = run_sample(s, ctx.common.seed);
    std::string lines = transcript_jsonl(t);
    Report r;
    r.result["success"] = t.success;
    r.result["leaf"] = t.leaf;
    r.result["final_rho"] = to_string(t.final_rho);
    Json acc = Json::array();
    for (const auto& a : t.accepted) acc.push_back(a.str());
    r.result["accepted"] = acc;
    if (!transcript.empty()) {
      write_file(transcript, lines);
      r.result["transcript"] = transcript;
    } else {
      Json steps = Json::array();
      std::istringstream ls(lines);
      for (std::string l; std::getline(ls, l);) steps.push_back(Json::parse(l));
      r.result["steps"] = steps;
    }
    r.text = {t.success ? "success" : "failure"};
    r.exit_code = t.success ? 0 : 1;
    return r;
  });
  run->add_option("--in", in, "strategy file (JSON)")->required();
  run->add_option("--transcript", transcript, "write the JSON-lines transcript here");

  auto* exact = leaf(st, ctx, "exact", "exact success and bad-axiom probabilities", false, [] {
    auto s = load_instance(in);
    if (auto vs = validate(s); !vs.empty()) return invalid(vs);
    Report r;
    Rational p = exact_success_prob(s);
    Rational bad = bad_axiom_prob(s);
    r.result["p"] = to_string(p);
    r.result["bad_axiom_prob"] = to_string(bad);
    r.result["epsilon"] = to_string(s.epsilon);
    r.result["exceeds_epsilon"] = p > s.epsilon;
    r.text = {to_string(p)};
    return r;
  });
  exact->add_option("--in", in, "strategy file (JSON)")->required();

  auto* mc = leaf(st, ctx, "mc", "Monte Carlo success estimate", true, [&ctx] {
    auto s = load_instance(in);
    if (auto vs = validate(s); !vs.empty()) return invalid(vs);
    auto rep = mc_success_prob(s, samples, ctx.common.seed, ctx.common.jobs);
    rep.confidence = confidence;
    rep.half_width = chernoff_half_width(samples, confidence);
    Report r;
    r.result["samples"] = rep.samples;
    r.result["successes"] = rep.successes;
    r.result["estimate"] = rep.estimate;
    r.result["confidence"] = rep.confidence;
    r.result["half_width"] = rep.half_width;
    r.result["std_error"] = rep.std_error;
    std::ostringstream t;
    t << rep.estimate << " +- " << rep.half_width;
    r.text = {t.str()};
    return r;
  });
  mc->add_option("--in", in, "strategy file (JSON)")->required();
  mc->add_option("--samples", samples, "number of runs")->check(CLI::PositiveNumber);
  mc->add_option("--confidence", confidence, "two-sided confidence level")->check(CLI::Range(0.5, 0.999999));

  auto* sound = leaf(st, ctx, "soundness", "soundness audit over generated or stored instances", true, [&ctx] {
    Report r;
    if (!dir.empty()) {
      std::vector<std::string> files;
      std::error_code ec;
      for (const auto& e : std::filesystem::directory_iterator(dir, ec))
        if (e.path().extension() == ".json") files.push_back(e.path().string());
      if (ec) throw UsageError("cannot list " + dir);
      std::sort(files.begin(), files.end());
      auto cases = parallel_map<SoundnessCase>(files.size(), ctx.common.jobs,
                                               [&](std::size_t i) { return audit_instance(load_instance(files[i])); });
      std::uint64_t valid = 0, above = 0, bad_cases = 0;
      Json ce = Json::array();
      for (std::size_t i = 0; i < files.size(); ++i) {
        valid += cases[i].valid;
        above += cases[i].valid && cases[i].p > cases[i].epsilon;
        if (cases[i].counterexample) {
          ++bad_cases;
          ce.push_back({{"file", std::filesystem::path(files[i]).filename().string()}, {"detail", cases[i].detail}});
        }
      }
      r.result["instances"] = files.size();
      r.result["valid"] = valid;
      r.result["above_capital"] = above;
      r.result["counterexamples"] = ce;
      r.text = {bad_cases ? std::to_string(bad_cases) + " counterexamples" : "no counterexamples"};
      r.exit_code = bad_cases || valid != files.size() ? 1 : 0;
      return r;
    }
    GeneratorConfig cfg;
    cfg.max_length = max_length;
    cfg.max_depth = max_depth;
    auto rep = soundness_harness(cfg, trials, ctx.common.seed, ctx.common.jobs);
    r.result["trials"] = rep.trials;
    r.result["valid"] = rep.valid;
    r.result["above_capital"] = rep.above_capital;
    r.result["false_goals"] = rep.false_goals;
    r.result["false_goal_above_capital"] = rep.false_goal_positive;
    Json ce = Json::array();
    for (const auto& c : rep.counterexamples) ce.push_back(c);
    r.result["counterexamples"] = ce;
    r.text = {rep.passed() ? "no counterexamples" : std::to_string(rep.counterexamples.size()) + " counterexamples"};
    r.exit_code = rep.passed() ? 0 : 1;
    return r;
  });
  sound->add_option("--trials", trials, "generated instances")->check(CLI::PositiveNumber);
  sound->add_option("--max-length", max_length, "longest sampled string")->check(CLI::Range(1u, 16u));
  sound->add_option("--max-depth", max_depth, "deepest randomized nesting")->check(CLI::Range(0u, 8u));
  sound->add_option("--dir", dir, "audit the *.json strategies in this directory instead");
}

void register_compile(CLI::App& app, Context& ctx) {
  auto* cp = app.add_subcommand("compile", "compile strategies into proofs");
  static std::string in, out, metrics;
  static std::string family = "B";
  static std::vector<unsigned> depths = {1, 2, 3, 4, 5};

  auto* run = leaf(cp, ctx, "run", "mark strong vertices and emit a checked proof", false, [] {
    auto s = load_instance(in);
    if (auto vs = validate(s); !vs.empty()) return invalid(vs);
    auto c = compile(s);
    Rational p = c.marking.root_entry().p;
    Report r;
    r.result["root_strong"] = c.marking.root_entry().strong;
    r.result["p"] = to_string(p);
    r.result["epsilon"] = to_string(s.epsilon);
    r.result["marked"] = c.marking.entries.size();
    std::size_t pc = probabilistic_complexity(s, false);
    r.result["prob_complexity"] = pc;
    if (!c.proof) {
      r.result["proof"] = nullptr;
      r.result["reason"] = c.reason;
      r.text = {"no proof: " + c.reason};
      r.exit_code = 1;
      return r;
    }
    auto chk = check_proof(*c.proof, c.declared);
    bool ok = chk.accepted && c.proof->theorem() == s.goal;
    r.result["compiled_size"] = c.proof_size;
    r.result["lines"] = c.proof->lines.size();
    r.result["checked"] = ok;
    if (!ok) r.result["check_reason"] = chk.accepted ? "theorem differs from goal" : chk.reason;
    Json bundle = proof_bundle(s, c);
    if (!out.empty()) {
      write_file(out, bundle.dump(2) + "\n");
      r.result["proof"] = out;
    } else {
      r.result["proof"] = bundle;
    }
    if (!metrics.empty()) {
      std::ostringstream m;
      m << "depth\tp\tepsilon\tprob_complexity\tcompiled_size\n"
        << strategy_depth(s) << '\t' << to_string(p) << '\t' << to_string(s.epsilon) << '\t' << pc << '\t'
        << c.proof_size << '\n';
      write_file(metrics, m.str());
      r.result["metrics"] = metrics;
    }
    r.columns = {"depth", "p", "epsilon", "prob_complexity", "compiled_size"};
    r.rows = {{std::to_string(strategy_depth(s)), to_string(p), to_string(s.epsilon), std::to_string(pc),
               std::to_string(c.proof_size)}};
    r.text = {ok ? "proof checked, " + std::to_string(c.proof->lines.size()) + " lines, size " +
                       std::to_string(c.proof_size)
                 : "proof rejected"};
    r.exit_code = ok ? 0 : 1;
    return r;
  });
  run->add_option("--in", in, "strategy file (JSON)")->required();
  run->add_option("--out", out, "write the proof bundle here");
  run->add_option("--metrics", metrics, "write a one-row metrics TSV here");

  auto* blow = leaf(cp, ctx, "blowup", "compiled size against probabilistic complexity", false, [] {
    BlowupFamily fam = load("family", [] { return parse_family(family); });
    auto rep = blowup_report(fam, depths);
    Report r;
    r.columns = {"depth", "prob_complexity", "prob_complexity_cert", "compiled_size", "lines", "checked", "ratio",
                 "ratio_cert"};
    Json rows = Json::array();
    bool all_checked = true;
    for (const auto& row : rep.rows) {
      all_checked = all_checked && row.checked;
      Json j;
      j["depth"] = row.depth;
      j["prob_complexity"] = row.prob_complexity;
      j["prob_complexity_cert"] = row.prob_complexity_cert;
      j["compiled_size"] = row.compiled_size;
      j["lines"] = row.compiled_lines;
      j["checked"] = row.checked;
      j["ratio"] = row.ratio;
      j["ratio_cert"] = row.ratio_cert;
      rows.push_back(j);
      std::vector<std::string> cells;
      for (const auto& [_, v] : j.items()) cells.push_back(scalar(v));
      r.rows.push_back(cells);
    }
    r.result["family"] = family_name(fam);
    r.result["rows"] = rows;
    r.result["strictly_increasing"] = rep.strictly_increasing;
    r.result["slope"] = rep.slope;
    r.result["r_squared"] = rep.r_squared;
    bool exp_fit = rep.strictly_increasing && rep.slope > 0 && rep.r_squared >= 0.95;
    r.result["exponential"] = exp_fit;
    for (const auto& row : r.rows) {
      std::string l;
      for (std::size_t i = 0; i < row.size(); ++i) l += (i ? " " : "") + r.columns[i] + "=" + row[i];
      r.text.push_back(l);
    }
    std::ostringstream fit;
    fit << "slope=" << rep.slope << " r_squared=" << rep.r_squared
        << " strictly_increasing=" << (rep.strictly_increasing ? "true" : "false");
    r.text.push_back(fit.str());
    r.exit_code = all_checked && (fam == BlowupFamily::Control || exp_fit) ? 0 : 1;
    return r;
  });
  blow->add_option("--family", family, "B (full) or C (control)");
  blow->add_option("--depths", depths, "comma-separated depths")->delimiter(',')->check(CLI::Range(0u, 8u));
}

}  // namespace ral::cli
