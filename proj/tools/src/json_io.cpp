#include "json_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "dnnflab/error.hpp"

namespace dnnflab::io {

json graph_to_json(const Graph& g) {
  json j;
  j["vertices"] = g.names();
  json edges = json::array();
  for (const auto& [u, v] : g.edges()) edges.push_back({g.name(u), g.name(v)});
  j["edges"] = std::move(edges);
  return j;
}

json layered_to_json(const LayeredGraph& g) {
  json j = graph_to_json(g.graph());
  j["h"] = g.h();
  j["k"] = g.k();
  return j;
}

Graph graph_from_json(const json& j) {
  try {
    auto names = j.at("vertices").get<std::vector<std::string>>();
    std::unordered_map<std::string, Vertex> id;
    for (std::size_t i = 0; i < names.size(); ++i) id.emplace(names[i], static_cast<Vertex>(i));
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw ContractError("edge entries must be pairs of vertex names");
      auto a = id.find(e[0].get<std::string>());
      auto b = id.find(e[1].get<std::string>());
      if (a == id.end() || b == id.end()) throw ContractError("edge names an unknown vertex");
      edges.emplace_back(a->second, b->second);
    }
    return Graph(std::move(names), std::move(edges));
  } catch (const json::exception& e) {
    throw ContractError(std::string("malformed graph JSON: ") + e.what());
  }
}

json vertex_names(const Graph& g, const VertexSet& s) {
  json a = json::array();
  for (Vertex v : s) a.push_back(g.name(v));
  return a;
}

VertexSet vertex_set_from_json(const Graph& g, const json& j) {
  if (!j.is_array()) throw ContractError("vertex set must be an array of names");
  std::vector<Vertex> out;
  for (const auto& x : j) out.push_back(g.at(x.get<std::string>()));
  return make_var_set(std::move(out));
}

json triple_to_json(const Graph& g, const TargetTriple& t) {
  return {{"w", vertex_names(g, t.w)},
          {"u0", vertex_names(g, t.u0)},
          {"u1", vertex_names(g, t.u1)},
          {"theta", t.theta}};
}

TargetTriple triple_from_json(const Graph& g, const json& j) {
  try {
    TargetTriple t;
    t.w = vertex_set_from_json(g, j.at("w"));
    t.u0 = vertex_set_from_json(g, j.at("u0"));
    t.u1 = vertex_set_from_json(g, j.at("u1"));
    t.theta = j.at("theta").get<std::size_t>();
    return t;
  } catch (const json::exception& e) {
    throw ContractError(std::string("malformed triple JSON: ") + e.what());
  }
}

json triple_report_to_json(const Graph& g, const TripleReport& r) {
  json conds = json::array();
  for (std::size_t i = 0; i < r.holds.size(); ++i) {
    json c = {{"condition", i + 1}, {"holds", r.holds[i]}};
    if (r.witness[i]) c["witness"] = g.name(*r.witness[i]);
    conds.push_back(std::move(c));
  }
  return {{"ok", r.ok()}, {"disjoint", r.disjoint}, {"conditions", std::move(conds)}, {"summary", r.summary(g)}};
}

json analysis_to_json(const LayeredGraph& g, const AnalysisResult& r) {
  const Graph& gr = g.graph();
  json j = {{"branch", r.branch},
            {"h0", r.h0},
            {"h1", r.h1},
            {"prefixLen", r.prefix_len},
            {"rank", r.rank},
            {"familySize", r.family_size},
            {"droppedPaths", r.dropped},
            {"anchorPick", r.anchor_pick},
            {"triple", triple_to_json(gr, r.triple)},
            {"validatorReport", triple_report_to_json(gr, r.report)}};
  j["h2"] = r.h2 ? json(*r.h2) : json(nullptr);
  if (r.bu_node) j["buNode"] = g.code(*r.bu_node);
  if (r.branch != "bu") {
    j["boundC"] = r.bound_c;
    j["bound260"] = r.bound_260;
  }
  return j;
}

json validation_to_json(const ValidationReport& r, const ImbalanceProfile& p, std::size_t theta) {
  return {{"ok", r.ok()},
          {"syntaxOk", r.syntax_ok()},
          {"theta", theta},
          {"acyclic", r.acyclic},
          {"singleSource", r.single_source},
          {"sinkLabels", r.sink_labels},
          {"readOnce", r.read_once},
          {"decomposable", r.decomposable},
          {"imbalanced", r.imbalanced},
          {"unreachable", r.unreachable},
          {"readOnceOffenders", r.read_once_offenders},
          {"decomposabilityOffenders", r.decomposability_offenders},
          {"balanced", r.balanced},
          {"imbalance",
           {{"n", p.n},
            {"maxMinSupport", p.max_min_support},
            {"maxBalancedMin", p.max_balanced_min},
            {"alphaThreshold", p.alpha_threshold}}}};
}

json ledger_summary_to_json(const LedgerReport& r) {
  json nodes = json::array();
  for (const auto& n : r.nodes)
    nodes.push_back({{"node", n.node},
                     {"observed", n.observed},
                     {"estimate", n.carried.value},
                     {"ciLow", n.carried.lo},
                     {"ciHigh", n.carried.hi}});
  return {{"theta", r.theta},
          {"samples", r.samples},
          {"carriedSamples", r.carried_samples},
          {"seed", r.seed},
          {"h0", r.h0},
          {"h1", r.h1},
          {"distinct", r.distinct()},
          {"unionSum", r.union_sum},
          {"falsifications", r.falsifications},
          {"noTriple", r.no_triple},
          {"elposChecks", r.elpos_checks},
          {"elposViolations", r.elpos_violations},
          {"nodes", std::move(nodes)}};
}

Permutation read_permutation(std::istream& in, const LayeredGraph& g) {
  std::vector<Vertex> order;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto v = g.graph().find(line);
    if (!v) throw ParseError("unknown vertex '" + line + "'", lineno);
    order.push_back(*v);
  }
  return Permutation(g, std::move(order));
}

void write_permutation(std::ostream& out, const LayeredGraph& g, const Permutation& pi) {
  for (Vertex v : pi.order()) out << g.graph().name(v) << '\n';
}

Assignment read_model(std::istream& in, std::uint32_t num_vars) {
  std::vector<Binding> b;
  std::string tok;
  while (in >> tok) {
    if (tok == "v") continue;
    long long x = 0;
    try {
      std::size_t used = 0;
      x = std::stoll(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ContractError("bad literal '" + tok + "' in model file");
    }
    if (x == 0) continue;
    const long long var = x < 0 ? -x : x;
    if (var > num_vars) throw ContractError("model literal " + tok + " is out of range");
    b.emplace_back(static_cast<Var>(var - 1), x > 0);
  }
  return Assignment::from_bindings(std::move(b));
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ContractError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ContractError(path + ": " + e.what());
  }
}

}  // namespace dnnflab::io
