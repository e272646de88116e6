#include "dnnflab/triples.hpp"

#include <sstream>

#include "dnnflab/error.hpp"

namespace dnnflab {

std::string TripleReport::summary(const Graph& g) const {
  std::ostringstream out;
  if (!disjoint) out << "sets are not pairwise disjoint; ";
  for (std::size_t i = 0; i < holds.size(); ++i) {
    if (holds[i]) continue;
    out << "condition " << (i + 1) << " fails";
    if (witness[i]) out << " at " << g.name(*witness[i]);
    out << "; ";
  }
  std::string s = out.str();
  if (s.empty()) return "ok";
  s.resize(s.size() - 2);
  return s;
}

TripleReport validate_triple(const Graph& g, const TargetTriple& t) {
  TripleReport r;
  r.disjoint = set_disjoint(t.w, t.u0) && set_disjoint(t.w, t.u1) && set_disjoint(t.u0, t.u1);
  auto fail = [&](int c, Vertex v) {
    if (r.holds[c]) {
      r.holds[c] = false;
      r.witness[c] = v;
    }
  };

  for (const auto& comp : components(g, t.u1))
    if (comp.size() <= t.theta) fail(0, comp.front());

  for (Vertex u : t.u0) {
    bool to_u1 = false, to_w = false;
    for (Vertex x : g.neighbors(u)) {
      to_u1 = to_u1 || set_contains(t.u1, x);
      to_w = to_w || set_contains(t.w, x);
    }
    if (!to_u1 || !to_w) fail(1, u);
  }

  for (Vertex v : t.u1)
    for (Vertex x : g.neighbors(v))
      if (set_contains(t.w, x)) fail(2, v);

  for (Vertex u : t.u0)
    for (Vertex x : g.neighbors(u))
      if (set_contains(t.u0, x)) fail(3, u);

  VertexSet nw = set_intersection(open_neighborhood(g, t.u0), t.w);
  for (Vertex v : nw)
    for (Vertex x : g.neighbors(v))
      if (set_contains(nw, x)) fail(4, v);

  for (Vertex v : t.w)
    if (neighbors_in(g, v, t.u0).size() > 1) fail(5, v);
  return r;
}

PosNeg pos_neg_split(const Graph& g, const VertexSet& path_vars, const Assignment& a, const VertexSet& u0) {
  PosNeg out;
  for (Vertex u : u0) {
    bool positive = true;
    for (Vertex x : neighbors_in(g, u, path_vars)) {
      auto v = a.value(x);
      if (!v) throw ContractError("path assignment does not bind " + g.name(x));
      if (!*v) {
        positive = false;
        break;
      }
    }
    (positive ? out.pos : out.neg).push_back(u);
  }
  return out;
}

VertexSet bottleneck_set(const Graph& g, const VertexSet& path_vars, const Assignment& a, const TargetTriple& t) {
  if (a.vars() != path_vars || path_vars != t.w)
    throw ContractError("bottleneck set needs Var(a) = path variables = W");
  auto report = validate_triple(g, t);
  if (!report.ok()) throw ContractError("invalid target triple: " + report.summary(g));
  auto split = pos_neg_split(g, path_vars, a, t.u0);
  std::vector<Vertex> out(split.neg.begin(), split.neg.end());
  for (Vertex u : split.pos)
    for (Vertex x : neighbors_in(g, u, t.w)) out.push_back(x);
  return make_var_set(std::move(out));
}

}  // namespace dnnflab
