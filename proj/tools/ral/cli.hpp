#pragma once

// Shared plumbing for the ral subcommands: common flags, report emission and
// exit-code handling.

#include "ral/error.hpp"
#include "ral/pcg32.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace ral::cli {

using Json = nlohmann::ordered_json;

/// Bad flags or unreadable inputs; exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Report {
  Json result = Json::object();
  std::vector<std::string> columns;               // tsv table, optional
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> text;                  // text lines, optional
  int exit_code = 0;
};

struct Common {
  std::string format = "json";
  unsigned jobs = 1;
  std::uint64_t seed = 0;
};

struct Context {
  Common common;
  std::string command;
  Json config = Json::object();
  std::function<Report()> action;
};

/// Adds --format, --jobs and --seed (RAL_SEED fallback) to a leaf subcommand.
inline void add_common(CLI::App* sub, Context& ctx, bool seeded) {
  sub->add_option("--format", ctx.common.format, "output format")->check(CLI::IsMember({"json", "tsv", "text"}));
  sub->add_option("--jobs", ctx.common.jobs, "worker threads")->check(CLI::Range(1u, 256u));
  if (seeded) sub->add_option("--seed", ctx.common.seed, "64-bit seed")->envname("RAL_SEED");
}

/// Registers a leaf: `record` fills the config echo once flags are parsed.
inline CLI::App* leaf(CLI::App* parent, Context& ctx, const std::string& name, const std::string& help, bool seeded,
                      std::function<Report()> run) {
  CLI::App* sub = parent->add_subcommand(name, help);
  add_common(sub, ctx, seeded);
  std::string full = parent->get_name() + " " + name;
  sub->callback([&ctx, sub, full, seeded, run] {
    ctx.command = full;
    ctx.config = Json::object();
    ctx.config["command"] = full;
    if (seeded) ctx.config["seed"] = ctx.common.seed;
    ctx.config["format"] = ctx.common.format;
    for (const CLI::Option* o : sub->get_options()) {
      std::string n = o->get_lnames().empty() ? "" : o->get_lnames().front();
      if (n.empty() || n == "help" || n == "format" || n == "jobs" || n == "seed") continue;
      if (o->get_type_size() == 0) {
        ctx.config[n] = o->count() > 0;
        continue;
      }
      auto vals = o->results();
      if (o->count() == 0) {
        if (o->get_default_str().empty()) continue;
        std::string d = o->get_default_str();
        if (d.size() >= 2 && d.front() == '[' && d.back() == ']') d = d.substr(1, d.size() - 2);
        vals = {d};
      }
      if (o->get_expected_max() > 1 || vals.size() > 1) {
        std::string joined;
        for (const auto& v : vals) joined += (joined.empty() ? "" : ",") + v;
        ctx.config[n] = joined;
      } else {
        ctx.config[n] = vals.empty() ? "" : vals.front();
      }
    }
    ctx.action = run;
  });
  return sub;
}

inline std::string scalar(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

inline void emit(const Context& ctx, const Report& r, std::ostream& out) {
  const std::string& fmt = ctx.common.format;
  if (fmt == "json") {
    Json doc = Json::object();
    doc["config"] = ctx.config;
    doc["result"] = r.result;
    out << doc.dump(2) << '\n';
    return;
  }
  if (fmt == "tsv") {
    for (const auto& [k, v] : ctx.config.items()) out << "# " << k << '\t' << scalar(v) << '\n';
    if (!r.columns.empty()) {
      for (std::size_t i = 0; i < r.columns.size(); ++i) out << (i ? "\t" : "") << r.columns[i];
      out << '\n';
      for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "\t" : "") << row[i];
        out << '\n';
      }
    } else {
      for (const auto& [k, v] : r.result.items()) out << k << '\t' << (v.is_structured() ? v.dump() : scalar(v)) << '\n';
    }
    return;
  }
  out << "#";
  for (const auto& [k, v] : ctx.config.items()) out << ' ' << k << '=' << scalar(v);
  out << '\n';
  if (!r.text.empty()) {
    for (const auto& l : r.text) out << l << '\n';
  } else {
    for (const auto& [k, v] : r.result.items()) out << k << ": " << (v.is_structured() ? v.dump() : scalar(v)) << '\n';
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

inline void write_file(const std::string& path, const std::string& data) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + path);
  f << data;
}

inline Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(what + ": " + e.what());
  }
}

/// Runs a loader, turning library/JSON errors into usage errors.
template <class Fn>
auto load(const std::string& what, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const UsageError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(what + ": " + e.what());
  } catch (const Error& e) {
    throw UsageError(what + ": " + e.what());
  }
}

inline std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void register_proof(CLI::App& app, Context& ctx);
void register_strategy(CLI::App& app, Context& ctx);
void register_compile(CLI::App& app, Context& ctx);
void register_tqbf(CLI::App& app, Context& ctx);
void register_kolmo(CLI::App& app, Context& ctx);
void register_corpus(CLI::App& app, Context& ctx);

}  // namespace ral::cli
