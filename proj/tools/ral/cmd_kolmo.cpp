// kolmo subcommands.

#include "cli.hpp"

#include "ral/kolmo_io.hpp"

namespace ral::cli {

namespace {

using namespace ral::kolmo;

std::string table_in, table_out;
unsigned l_max = 0;
std::uint64_t s_max = 0;

void add_table_flags(CLI::App* sub) {
  sub->add_option("--table", table_in, "load a stored complexity table");
  sub->add_option("--save-table", table_out, "store the table used");
  sub->add_option("--l-max", l_max, "program bit cap (0: min(3n, 30))");
  sub->add_option("--s-max", s_max, "step cap (0: 100000)");
}

Table obtain_table(unsigned n, unsigned jobs) {
  Table t;
  if (!table_in.empty()) {
    t = load(table_in, [] { return load_table(table_in); });
    if (t.caps.n < n) throw UsageError(table_in + " covers strings up to length " + std::to_string(t.caps.n));
  } else {
    Caps caps = Caps::defaults(n);
    if (l_max) caps.l_max = l_max;
    if (s_max) caps.s_max = s_max;
    t = build_table(caps, jobs);
  }
  if (!table_out.empty()) write_file(table_out, serialize_table(t));
  return t;
}

void describe(Report& r, const Table& t) {
  Json c;
  c["n"] = t.caps.n;
  c["l_max"] = t.caps.l_max;
  c["s_max"] = t.caps.s_max;
  c["programs"] = t.programs;
  c["unresolved"] = t.unresolved;
  c["exact_under_caps"] = t.exact_under_caps();
  r.result["table"] = c;
}

Json opt_json(const std::optional<unsigned>& k) { return k ? Json(*k) : Json(nullptr); }
std::string opt_str(const std::optional<unsigned>& k) { return k ? std::to_string(*k) : "none"; }

void row(Report& r, std::vector<std::string> cells, const Json& j) {
  r.rows.push_back(std::move(cells));
  r.result["rows"].push_back(j);
}

}  // namespace

void register_kolmo(CLI::App& app, Context& ctx) {
  auto* ko = app.add_subcommand("kolmo", "the toy machine and its complexity tables");
  static std::string program, x;
  static std::uint64_t steps = 100000, t_bound = 100000, samples = 1, s_audit = 0;
  static std::size_t output_limit = std::size_t{1} << 20;
  static unsigned n = 8;
  static std::optional<unsigned> c;

  auto* run = leaf(ko, ctx, "run", "run a program", false, [] {
    if (!is_bitstring(program)) throw UsageError("--program must be a bitstring");
    auto p = vm::decode(program);
    auto res = vm::run(p, steps, output_limit);
    Report r;
    r.result["program"] = vm::encode(p);
    r.result["bits"] = vm::program_bits(p);
    r.result["status"] = vm::status_name(res.status);
    r.result["proven_loop"] = res.proven_loop;
    r.result["steps"] = res.steps;
    r.result["output"] = res.output;
    r.text = {std::string(vm::status_name(res.status)) + " after " + std::to_string(res.steps) + " steps: \"" +
              res.output + "\""};
    return r;
  });
  run->add_option("--program", program, "program bits")->required();
  run->add_option("--steps", steps, "step cap");
  run->add_option("--output-limit", output_limit, "overflow beyond this many output bits");

  auto* kc = leaf(ko, ctx, "k", "time-bounded complexity of one string", false, [&ctx] {
    if (!is_bitstring(x)) throw UsageError("--x must be a bitstring");
    Report r;
    std::optional<unsigned> k;
    if (!table_in.empty()) {
      auto t = obtain_table(static_cast<unsigned>(x.size()), ctx.common.jobs);
      describe(r, t);
      k = t.k_t(x, t_bound);
    } else {
      unsigned cap = l_max ? l_max : std::min<unsigned>(3 * static_cast<unsigned>(x.size()), 30u);
      r.result["l_max"] = cap;
      k = k_t_search(x, t_bound, cap);
    }
    r.result["x"] = x;
    r.result["t"] = t_bound;
    r.result["k"] = opt_json(k);
    r.text = {opt_str(k)};
    return r;
  });
  kc->add_option("--x", x, "target string")->required();
  kc->add_option("--t", t_bound, "step bound");
  add_table_flags(kc);

  auto* count = leaf(ko, ctx, "count", "exact counting bound on the table", false, [&ctx] {
    auto t = obtain_table(n, ctx.common.jobs);
    Report r;
    describe(r, t);
    r.columns = {"n", "c", "compressible", "fraction", "bound", "holds"};
    r.result["rows"] = Json::array();
    bool all = true;
    for (unsigned m = c ? n : 0; m <= n; ++m)
      for (unsigned cc = c ? *c : 0; cc <= (c ? *c : m); ++cc) {
        auto rep = counting_check(t, m, cc);
        all = all && rep.holds;
        Json j{{"n", m}, {"c", cc}, {"compressible", rep.compressible}, {"fraction", to_string(rep.fraction)},
               {"bound", to_string(rep.bound)}, {"holds", rep.holds}};
        row(r, {std::to_string(m), std::to_string(cc), std::to_string(rep.compressible), to_string(rep.fraction),
                to_string(rep.bound), rep.holds ? "true" : "false"},
            j);
        r.text.push_back("n=" + std::to_string(m) + " c=" + std::to_string(cc) + " fraction=" +
                         to_string(rep.fraction) + " bound=" + to_string(rep.bound) + (rep.holds ? "" : " FAIL"));
      }
    r.result["holds"] = all;
    r.exit_code = all ? 0 : 1;
    return r;
  });
  count->add_option("--n", n, "string length")->check(CLI::Range(0u, 16u));
  count->add_option("--c", c, "deficiency (default: every c in 0..n, every length up to n)");
  add_table_flags(count);

  auto* sample = leaf(ko, ctx, "sample", "draw incompressibility axioms", true, [&ctx] {
    unsigned cc = c.value_or(3);
    if (cc > n) throw UsageError("--c must not exceed --n");
    auto t = obtain_table(n, ctx.common.jobs);
    Report r;
    describe(r, t);
    if (samples == 1) {
      auto a = sample_axiom(t, n, cc, ctx.common.seed);
      r.result["x"] = a.x;
      r.result["axiom"] = a.statement();
      r.result["k_final"] = opt_json(a.k_final);
      r.result["valid"] = a.valid;
      r.text = {a.statement() + (a.valid ? "" : " (refuted by the table)")};
      return r;
    }
    auto draws = parallel_map<char>(samples, ctx.common.jobs, [&](std::size_t i) {
      return static_cast<char>(!sample_axiom(t, n, cc, derive_seed(ctx.common.seed, i)).valid);
    });
    std::uint64_t invalid = 0;
    for (char d : draws) invalid += d;
    double p = to_double(counting_check(t, n, cc).fraction);
    double rate = static_cast<double>(invalid) / static_cast<double>(samples);
    double sd = std::sqrt(p * (1 - p) / static_cast<double>(samples));
    bool ok = std::abs(rate - p) <= 3 * sd + 1e-12;
    r.result["samples"] = samples;
    r.result["invalid"] = invalid;
    r.result["rate"] = rate;
    r.result["exact_fraction"] = p;
    r.result["within_3sd"] = ok;
    std::ostringstream s;
    s << "invalid rate " << rate << " exact " << p << (ok ? " ok" : " OUTSIDE 3 sd");
    r.text = {s.str()};
    r.exit_code = ok ? 0 : 1;
    return r;
  });
  sample->add_option("--n", n, "string length")->check(CLI::Range(0u, 16u));
  sample->add_option("--c", c, "deficiency (default 3)");
  sample->add_option("--samples", samples, "number of draws")->check(CLI::PositiveNumber);
  add_table_flags(sample);

  auto* tn = leaf(ko, ctx, "tn", "settling times T_m for m <= n", false, [&ctx] {
    auto t = obtain_table(n, ctx.common.jobs);
    Report r;
    describe(r, t);
    r.columns = {"n", "t_n", "witness", "exact_under_caps"};
    r.result["rows"] = Json::array();
    for (unsigned m = 0; m <= n; ++m) {
      auto rep = compute_Tn(t, m);
      row(r, {std::to_string(m), std::to_string(rep.t_n), rep.witness, rep.exact_under_caps ? "true" : "false"},
          {{"n", m}, {"t_n", rep.t_n}, {"witness", rep.witness}, {"exact_under_caps", rep.exact_under_caps},
           {"strings_without_program", rep.strings_without_program}});
      r.text.push_back("T_" + std::to_string(m) + " = " + std::to_string(rep.t_n) + " (\"" + rep.witness + "\")");
    }
    return r;
  });
  tn->add_option("--n", n, "largest length")->check(CLI::Range(0u, 16u));
  add_table_flags(tn);

  auto* halt = leaf(ko, ctx, "halting", "audit that short programs halt by T_n or not at all", false, [&ctx] {
    auto t = obtain_table(n, ctx.common.jobs);
    Report r;
    describe(r, t);
    std::vector<unsigned> ns;
    for (unsigned m = 1; m <= n; ++m) ns.push_back(m);
    std::optional<unsigned> cc = c;
    if (!cc) {
      cc = calibrate_margin(t, ns);
      r.result["calibrated"] = true;
    }
    if (!cc) {
      r.result["c"] = nullptr;
      r.text = {"no margin up to 8 passes"};
      r.exit_code = 1;
      return r;
    }
    r.result["c"] = *cc;
    r.columns = {"n", "max_bits", "t_n", "s_audit", "programs", "halted_by_tn", "proven_loops", "running",
                 "counterexamples"};
    r.result["rows"] = Json::array();
    bool all = true;
    for (unsigned m : ns) {
      auto tn_m = compute_Tn(t, m).t_n;
      auto rep = halting_bound_check(tn_m, m, *cc, s_audit ? s_audit : default_audit_cap(tn_m));
      all = all && rep.passed();
      Json ce = Json::array();
      for (const auto& [bits, st] : rep.counterexamples) ce.push_back({{"program", bits}, {"steps", st}});
      row(r,
          {std::to_string(m), std::to_string(rep.max_bits), std::to_string(rep.t_n), std::to_string(rep.s_audit),
           std::to_string(rep.programs), std::to_string(rep.halted_by_tn), std::to_string(rep.proven_loops),
           std::to_string(rep.running_at_audit), std::to_string(rep.counterexamples.size())},
          {{"n", m}, {"max_bits", rep.max_bits}, {"t_n", rep.t_n}, {"s_audit", rep.s_audit},
           {"programs", rep.programs}, {"halted_by_tn", rep.halted_by_tn}, {"proven_loops", rep.proven_loops},
           {"running", rep.running_at_audit}, {"counterexamples", ce}});
      r.text.push_back("n=" + std::to_string(m) + " programs=" + std::to_string(rep.programs) +
                       " late halts=" + std::to_string(rep.counterexamples.size()));
    }
    r.result["passed"] = all;
    r.exit_code = all ? 0 : 1;
    return r;
  });
  halt->add_option("--n", n, "largest length")->check(CLI::Range(1u, 16u));
  halt->add_option("--c", c, "margin constant (default: calibrate)");
  halt->add_option("--s-audit", s_audit, "audit step cap (0: max(10^6, 100 T_n))");
  add_table_flags(halt);

  auto* f2 = leaf(ko, ctx, "factor2", "factor-2 settling check", false, [&ctx] {
    auto t = obtain_table(n, ctx.common.jobs);
    auto rep = factor2_check(t, n);
    Report r;
    describe(r, t);
    r.result["n"] = n;
    r.result["t_prime"] = rep.t_prime;
    r.result["t_n"] = rep.t_n;
    r.result["max_k"] = rep.max_k;
    r.result["audited"] = rep.audited.size();
    Json fails = Json::array();
    for (const auto& [time, xm] : rep.failures) fails.push_back({{"t", time}, {"x_max", xm}});
    r.result["failures"] = fails;
    r.result["half_axioms_consistent"] = rep.half_axioms_consistent;
    r.result["passed"] = rep.passed();
    r.text = {"T'_n=" + std::to_string(rep.t_prime) + " T_n=" + std::to_string(rep.t_n) + " audited " +
              std::to_string(rep.audited.size()) + " times, " + (rep.passed() ? "holds" : "FAILS")};
    r.exit_code = rep.passed() ? 0 : 1;
    return r;
  });
  f2->add_option("--n", n, "string length")->check(CLI::Range(1u, 16u));
  add_table_flags(f2);
}

}  // namespace ral::cli
