#pragma once

// Brute-force reference implementations used by the unit tests and the
// acceptance runner. They are deliberately naive and share no code paths
// with the library beyond the plain data types.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dnnflab/assignments.hpp"
#include "dnnflab/cnf.hpp"
#include "dnnflab/dnnf.hpp"
#include "dnnflab/graph.hpp"
#include "dnnflab/permwidth.hpp"
#include "dnnflab/probability.hpp"

namespace oracle {

using namespace dnnflab;

inline Cnf random_cnf(std::mt19937& rng, std::uint32_t max_vars, std::size_t max_clauses) {
  Cnf f;
  f.num_vars = std::uniform_int_distribution<std::uint32_t>(1, max_vars)(rng);
  const std::size_t nc = std::uniform_int_distribution<std::size_t>(0, max_clauses)(rng);
  std::uniform_int_distribution<std::uint32_t> var(0, f.num_vars - 1);
  std::uniform_int_distribution<int> width(1, 3), coin(0, 1);
  for (std::size_t c = 0; c < nc; ++c) {
    Clause cl;
    const int w = width(rng);
    for (int l = 0; l < w; ++l) cl.push_back({var(rng), coin(rng) == 1});
    f.clauses.push_back(std::move(cl));
  }
  return f;
}

inline bool clause_sat(const Clause& c, std::uint64_t bits) {
  for (const Literal& l : c)
    if (((bits >> l.var) & 1U) == (l.positive ? 1U : 0U)) return true;
  return false;
}

inline std::uint64_t count_models(const Cnf& f) {
  std::uint64_t n = 0;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << f.num_vars); ++bits) {
    bool ok = true;
    for (const auto& c : f.clauses)
      if (!clause_sat(c, bits)) {
        ok = false;
        break;
      }
    n += ok;
  }
  return n;
}

/// Every model of f over variables 0..num_vars-1, as total assignments.
inline std::vector<Assignment> models(const Cnf& f) {
  std::vector<Assignment> out;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << f.num_vars); ++bits) {
    bool ok = std::all_of(f.clauses.begin(), f.clauses.end(), [&](const Clause& c) { return clause_sat(c, bits); });
    if (!ok) continue;
    std::vector<Binding> b;
    for (Var v = 0; v < f.num_vars; ++v) b.emplace_back(v, ((bits >> v) & 1U) != 0);
    out.push_back(Assignment::from_bindings(std::move(b)));
  }
  return out;
}

/// H|_a by filtering the member list.
inline std::set<Assignment> restrict_members(const AssignmentSet& h, const Assignment& a) {
  std::set<Assignment> out;
  for (const Assignment& m : h.members()) {
    bool agrees = true;
    for (const auto& [v, bit] : a.bindings())
      if (m.binds(v) && *m.value(v) != bit) agrees = false;
    if (agrees) out.insert(m.minus(a));
  }
  return out;
}

inline std::set<Assignment> member_set(const AssignmentSet& h) {
  auto ms = h.members();
  return {ms.begin(), ms.end()};
}

/// Whether H equals the explicit product of its projections onto s and the
/// rest, built member by member.
inline bool splits_explicitly(const AssignmentSet& h, const VarSet& s) {
  std::set<Assignment> left, right;
  for (const Assignment& m : h.members()) {
    left.insert(project(m, s));
    right.insert(m.minus(project(m, s)));
  }
  std::set<Assignment> prod;
  for (const auto& l : left)
    for (const auto& r : right) prod.insert(l.unite(r));
  return prod == member_set(h);
}

/// Some bipartition of Var(H) that separates two vertices of Y is a
/// rectangle.
inline bool breaks_naive(const AssignmentSet& h, const VarSet& y) {
  const VarSet& u = h.universe();
  const std::size_t n = u.size();
  for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << n); ++mask) {
    VarSet s;
    for (std::size_t i = 0; i < n; ++i)
      if ((mask >> i) & 1U) s.push_back(u[i]);
    bool in = false, out = false;
    for (Var v : y) {
      if (!set_contains(u, v)) continue;
      (set_contains(s, v) ? in : out) = true;
    }
    if (in && out && splits_explicitly(h, s)) return true;
  }
  return false;
}

/// Depth-first search over target paths, recursing into both children of a
/// conjunction and into the g-consistent child of a decision.
inline bool carried_naive(const DecisionDnnf& b, const Assignment& g, NodeId u) {
  std::vector<char> seen(b.size(), 0);
  std::function<bool(NodeId)> dfs = [&](NodeId x) {
    if (x == u) return true;
    if (seen[x]) return false;
    seen[x] = 1;
    const Node& n = b.node(x);
    if (n.kind == NodeKind::kConj) return dfs(n.lo) || dfs(n.hi);
    if (n.kind == NodeKind::kDecision) {
      auto val = g.value(n.var);
      if (!val) return false;
      return dfs(*val ? n.hi : n.lo);
    }
    return false;
  };
  return dfs(b.source());
}

/// Pr(S ⊆ Out(e)) by walking all orientations of the edges touching S.
inline Rational pr_set_naive(const Graph& g, const VertexSet& s) {
  std::vector<Edge> inc;
  for (const auto& e : g.edges())
    if (set_contains(s, e.first) || set_contains(s, e.second)) inc.push_back(e);
  std::uint64_t good = 0;
  const std::uint64_t total = std::uint64_t{1} << inc.size();
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    std::vector<char> pos(g.num_vertices(), 0);
    for (std::size_t i = 0; i < inc.size(); ++i) pos[((bits >> i) & 1U) ? inc[i].second : inc[i].first] = 1;
    good += std::all_of(s.begin(), s.end(), [&](Vertex v) { return pos[v] != 0; });
  }
  return Rational(good, total);
}

// ---------------------------------------------------------------------------
// T[h,k] facts read off the vertex names alone ("<code>:<i>", "@" = root).

inline std::string code_of(const Graph& g, Vertex v) {
  const std::string& n = g.name(v);
  std::string c = n.substr(0, n.find(':'));
  return c == "@" ? std::string() : c;
}

inline int height_of(const Graph& g, int h, Vertex v) { return h - static_cast<int>(code_of(g, v).size()); }

inline bool under(const std::string& code, const std::string& anc) { return code.compare(0, anc.size(), anc) == 0; }

/// The td definition evaluated directly: for every height-h1 node t, the
/// shortest prefix with k vertices above h0 under t leaves some height-h0
/// subtree under t untouched.
inline bool td_naive(const LayeredGraph& lg, const Permutation& pi, int h0, int h1) {
  const Graph& g = lg.graph();
  const int h = lg.h(), k = lg.k();
  std::set<std::string> tops;
  for (Vertex v = 0; v < g.num_vertices(); ++v)
    if (height_of(g, h, v) == h1) tops.insert(code_of(g, v));
  for (const std::string& t : tops) {
    std::set<std::string> roots;
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
      std::string c = code_of(g, v);
      if (under(c, t) && height_of(g, h, v) == h0) roots.insert(c);
    }
    int high = 0;
    std::set<std::string> touched;
    for (Vertex v : pi.order()) {
      std::string c = code_of(g, v);
      if (!under(c, t)) continue;
      if (height_of(g, h, v) > h0) {
        if (++high == k) break;
      } else {
        touched.insert(c.substr(0, static_cast<std::size_t>(h - h0)));
      }
    }
    if (touched.size() == roots.size()) return false;
  }
  return true;
}

/// The bu definition for one node: the prefix avoids everything above h0
/// under t and meets every height-h0 subtree under t.
inline bool bu_naive(const LayeredGraph& lg, const Permutation& pi, int h0, TreeNode t, std::size_t len) {
  const Graph& g = lg.graph();
  const int h = lg.h();
  const std::string tc = lg.code(t) == "@" ? std::string() : lg.code(t);
  std::set<std::string> roots, hit;
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    std::string c = code_of(g, v);
    if (under(c, tc) && height_of(g, h, v) == h0) roots.insert(c);
  }
  for (std::size_t p = 0; p < len; ++p) {
    Vertex v = pi.at(p);
    std::string c = code_of(g, v);
    if (!under(c, tc)) continue;
    if (height_of(g, h, v) > h0) return false;
    hit.insert(c.substr(0, static_cast<std::size_t>(h - h0)));
  }
  return hit == roots;
}

inline Permutation shuffled(const LayeredGraph& g, std::mt19937_64& rng) {
  std::vector<Vertex> o(g.num_vertices());
  for (Vertex v = 0; v < o.size(); ++v) o[v] = v;
  std::shuffle(o.begin(), o.end(), rng);
  return Permutation(g, std::move(o));
}

/// Leaves first, then upwards: a permutation that touches every low subtree
/// before any high vertex, so td fails wherever the gap allows it to.
inline Permutation leaves_first(const LayeredGraph& g) {
  auto o = bfs_order(g).order();
  std::reverse(o.begin(), o.end());
  return Permutation(g, std::move(o));
}

}  // namespace oracle
