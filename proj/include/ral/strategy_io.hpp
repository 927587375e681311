#pragma once

// JSON strategy files and JSON-lines transcripts.

#include "ral/strategy.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace ral {

inline nlohmann::json to_json(const StrategyInstance& s) {
  using nlohmann::json;
  json j;
  j["epsilon"] = to_string(s.epsilon);
  auto preds = json::array();
  for (const auto& [name, p] : s.ground_truth.predicates()) {
    std::set<std::string> f;
    if (p.falsifiers) {
      f = *p.falsifiers;
    } else {
      if (p.length > 20) throw BudgetError("cannot serialize predicate '" + name + "' by enumeration");
      for (std::uint64_t v = 0; v < (std::uint64_t{1} << p.length); ++v)
        if (!p.holds(bits_of(v, p.length))) f.insert(bits_of(v, p.length));
    }
    preds.push_back({{"name", name}, {"length", p.length}, {"false_on", f}});
  }
  j["predicates"] = preds;
  json goals = json::object();
  for (const auto& [g, v] : s.ground_truth.goals()) goals[g] = v;
  j["goals"] = goals;
  auto ax = json::array();
  for (const auto& a : s.base_axioms) ax.push_back(a.str());
  j["base_axioms"] = ax;
  j["goal"] = s.goal.str();
  j["root"] = s.root;
  auto nodes = json::array();
  for (std::size_t id = 0; id < s.nodes.size(); ++id) {
    json n;
    n["id"] = id;
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Leaf>) {
            n["kind"] = "leaf";
            n["goal"] = x.goal.str();
          } else if constexpr (std::is_same_v<T, InferStep>) {
            n["kind"] = "infer";
            n["axiom"] = x.axiom.str();
            n["justification"] = to_json(x.justification);
            n["child"] = x.child;
          } else {
            n["kind"] = "random";
            n["pred"] = x.pred;
            n["delta"] = to_string(x.delta);
            if (x.certificate) n["certificate"] = {{"falsifiers", x.certificate->falsifiers}};
            if (x.selector.kind == ChildSelector::Kind::Constant) {
              n["selector"] = {{"kind", "constant"}, {"child", x.selector.child}};
            } else {
              json t = json::object();
              for (const auto& [r, c] : x.selector.table) t[r] = c;
              n["selector"] = {{"kind", "table"}, {"children", t}};
            }
          }
        },
        s.nodes[id]);
    nodes.push_back(std::move(n));
  }
  j["nodes"] = nodes;
  j["options"] = {{"max_atoms", s.options.entail.max_atoms}, {"exact_budget", s.options.exact_budget}};
  return j;
}

inline StrategyInstance strategy_from_json(const nlohmann::json& j) {
  StrategyInstance s;
  try {
    s.epsilon = parse_rational(j.at("epsilon").get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw Error(std::string("epsilon: ") + e.what());
  }
  for (const auto& p : j.at("predicates")) {
    std::set<std::string> f;
    if (p.contains("false_on")) f = p["false_on"].get<std::set<std::string>>();
    s.ground_truth.define_by_falsifiers(p.at("name").get<std::string>(), p.at("length").get<unsigned>(), f);
  }
  if (j.contains("goals"))
    for (const auto& [g, v] : j["goals"].items()) s.ground_truth.set_goal(g, v.get<bool>());
  if (j.contains("options")) {
    const auto& o = j["options"];
    if (o.contains("max_atoms")) s.options.entail.max_atoms = o["max_atoms"].get<std::size_t>();
    if (o.contains("exact_budget")) s.options.exact_budget = o["exact_budget"].get<std::uint64_t>();
  }
  Signature sig = s.ground_truth.signature();
  for (const auto& a : j.at("base_axioms")) s.base_axioms.push_back(parse_formula(a.get<std::string>(), sig));
  s.goal = parse_formula(j.at("goal").get<std::string>(), sig);
  s.root = j.value("root", std::size_t{0});
  const auto& nodes = j.at("nodes");
  s.nodes.resize(nodes.size());
  std::vector<bool> filled(nodes.size(), false);
  for (std::size_t pos = 0; pos < nodes.size(); ++pos) {
    const auto& n = nodes[pos];
    std::size_t id = n.value("id", pos);
    if (id >= nodes.size() || filled[id]) throw Error("bad or duplicate node id " + std::to_string(id));
    filled[id] = true;
    std::string kind = n.at("kind").get<std::string>();
    if (kind == "leaf") {
      s.nodes[id] = Leaf{parse_formula(n.at("goal").get<std::string>(), sig)};
    } else if (kind == "infer") {
      InferStep inf;
      inf.axiom = parse_formula(n.at("axiom").get<std::string>(), sig);
      inf.justification = proof_from_json(n.at("justification"), sig);
      inf.child = n.at("child").get<NodeId>();
      s.nodes[id] = std::move(inf);
    } else if (kind == "random") {
      RandomStep r;
      r.pred = n.at("pred").get<std::string>();
      r.length = s.ground_truth.predicate(r.pred).length;
      r.delta = parse_rational(n.at("delta").get<std::string>());
      if (r.delta < 0 || r.delta > 1) throw Error("delta must lie in [0,1]");
      if (n.contains("certificate")) {
        const auto& c = n["certificate"];
        if (c.is_string() && c.get<std::string>() == "enumerate") {
          r.certificate = counting_certificate(r.pred, r.length, r.delta, s.ground_truth, s.options.certificate_bound);
        } else {
          CountingCertificate cert{r.pred, r.length, r.delta, c.at("falsifiers").get<std::uint64_t>(), false};
          cert.certified = Rational(cert.falsifiers) <= r.delta * Rational(pow2(r.length));
          r.certificate = cert;
        }
      }
      const auto& sel = n.at("selector");
      std::string sk = sel.at("kind").get<std::string>();
      if (sk == "constant") {
        r.selector = ChildSelector::constant(sel.at("child").get<NodeId>());
      } else if (sk == "table") {
        std::map<std::string, NodeId> t;
        for (const auto& [x, c] : sel.at("children").items()) t[x] = c.get<NodeId>();
        r.selector = ChildSelector::from_table(std::move(t));
      } else {
        throw Error("unknown selector kind '" + sk + "'");
      }
      s.nodes[id] = std::move(r);
    } else {
      throw Error("unknown node kind '" + kind + "'");
    }
  }
  return s;
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("'" + path + "': " + e.what());
  }
}

inline StrategyInstance load_strategy(const std::string& path) { return strategy_from_json(read_json_file(path)); }

/// One JSON object per step, then one summary line.
inline std::string transcript_jsonl(const Transcript& t) {
  std::ostringstream out;
  for (const auto& st : t.steps) {
    nlohmann::json j{{"node", st.node}, {"kind", st.randomized ? "random" : "infer"}, {"accepted", st.accepted.str()},
                     {"rho", to_string(st.rho)}};
    if (st.randomized) j["r"] = st.sample;
    out << j.dump() << '\n';
  }
  auto acc = nlohmann::json::array();
  for (const auto& a : t.accepted) acc.push_back(a.str());
  out << nlohmann::json{{"leaf", t.leaf}, {"outcome", t.success ? "success" : "failure"}, {"accepted", acc},
                        {"rho", to_string(t.final_rho)}}
             .dump()
      << '\n';
  return out.str();
}

}  // namespace ral
