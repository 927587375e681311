// corpus subcommands: deterministic input sets for the acceptance runs.

#include "cli.hpp"

#include "ral/blowup.hpp"
#include "ral/generator.hpp"
#include "ral/qbf.hpp"
#include "ral/strategy_io.hpp"

#include <cstdio>

namespace ral::cli {

namespace {

std::string numbered(const std::string& stem, std::uint64_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*llu", width, static_cast<unsigned long long>(i));
  return stem + buf + ".json";
}

}  // namespace

void register_corpus(CLI::App& app, Context& ctx) {
  auto* co = app.add_subcommand("corpus", "generate input corpora");
  static std::string out;
  static std::uint64_t count = 10000;
  static unsigned max_length = 4, max_depth = 3, max_vars = 3, max_connectives = 2;
  static std::string family = "B";
  static std::vector<unsigned> depths = {1, 2, 3, 4, 5};

  auto* strat = leaf(co, ctx, "strategies", "generated strategy instances", true, [&ctx] {
    GeneratorConfig cfg;
    cfg.max_length = max_length;
    cfg.max_depth = max_depth;
    auto bodies = parallel_map<std::string>(count, ctx.common.jobs, [&](std::size_t i) {
      return to_json(generate_strategy(cfg, derive_seed(ctx.common.seed, i))).dump(2) + "\n";
    });
    Fnv1a h;
    for (std::uint64_t i = 0; i < count; ++i) {
      write_file((std::filesystem::path(out) / numbered("strategy_", i, 5)).string(), bodies[i]);
      h.add(bodies[i]);
    }
    Report r;
    r.result["dir"] = out;
    r.result["files"] = count;
    r.result["digest"] = hex64(h.value());
    r.text = {std::to_string(count) + " strategies, digest " + hex64(h.value())};
    return r;
  });
  strat->add_option("--out", out, "output directory")->required();
  strat->add_option("--count", count, "number of instances")->check(CLI::PositiveNumber);
  strat->add_option("--max-length", max_length, "longest sampled string")->check(CLI::Range(1u, 16u));
  strat->add_option("--max-depth", max_depth, "deepest randomized nesting")->check(CLI::Range(0u, 8u));

  auto* qbf = leaf(co, ctx, "qbf", "exhaustive small-formula corpus plus curated instances", false, [] {
    auto all = exhaustive_qbf_corpus(max_vars, max_connectives);
    std::size_t exhaustive = all.size();
    for (auto& f : curated_qbf_corpus()) all.push_back(std::move(f));
    std::string lines;
    std::uint64_t truths = 0;
    for (std::size_t i = 0; i < all.size(); ++i) {
      bool v = brute_eval(all[i]);
      truths += v;
      lines += Json{{"id", i}, {"formula", all[i].str()}, {"value", v}, {"curated", i >= exhaustive}}.dump() + "\n";
    }
    write_file((std::filesystem::path(out) / "qbf_corpus.jsonl").string(), lines);
    Report r;
    r.result["file"] = (std::filesystem::path(out) / "qbf_corpus.jsonl").string();
    r.result["exhaustive"] = exhaustive;
    r.result["curated"] = all.size() - exhaustive;
    r.result["true"] = truths;
    r.result["false"] = all.size() - truths;
    r.text = {std::to_string(exhaustive) + " exhaustive + " + std::to_string(all.size() - exhaustive) +
              " curated formulas, " + std::to_string(truths) + " true"};
    return r;
  });
  qbf->add_option("--out", out, "output directory")->required();
  qbf->add_option("--max-vars", max_vars, "variables per formula")->check(CLI::Range(1u, 3u));
  qbf->add_option("--max-connectives", max_connectives, "connectives per matrix")->check(CLI::Range(0u, 3u));

  auto* blow = leaf(co, ctx, "blowup", "blowup family instances", false, [] {
    BlowupFamily fam = load("family", [] { return parse_family(family); });
    Json files = Json::array();
    for (unsigned m : depths) {
      auto path = (std::filesystem::path(out) / ("blowup_" + family_name(fam) + "_" + std::to_string(m) + ".json"))
                      .string();
      write_file(path, to_json(family_instance(fam, m)).dump(2) + "\n");
      files.push_back(path);
    }
    Report r;
    r.result["family"] = family_name(fam);
    r.result["files"] = files;
    r.text = {std::to_string(files.size()) + " files"};
    return r;
  });
  blow->add_option("--out", out, "output directory")->required();
  blow->add_option("--family", family, "B (full) or C (control)");
  blow->add_option("--depths", depths, "comma-separated depths")->delimiter(',')->check(CLI::Range(0u, 8u));
}

}  // namespace ral::cli
