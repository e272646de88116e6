#include "dnnflab/permwidth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <iterator>
#include <limits>
#include <numeric>

#include "dnnflab/error.hpp"

namespace dnnflab {

namespace {

std::vector<char> mark(std::size_t n, const VertexSet& s) {
  std::vector<char> m(n, 0);
  for (Vertex v : s) m[v] = 1;
  return m;
}

TreeNode ancestor_at(const LayeredGraph& g, TreeNode t, int height) {
  while (g.height(t) < height) t = *g.parent(t);
  return t;
}

TreeNode leftmost_at(const LayeredGraph& g, TreeNode t, int height) {
  while (g.height(t) > height) t = 3 * t + 1;
  return t;
}

// Smallest r with r*r >= k.
int ceil_sqrt(int k) {
  int r = 0;
  while (r * r < k) ++r;
  return r;
}

// Precomputed membership data for one PathHost.
struct HostView {
  std::vector<char> in_u;
  std::vector<char> in_u0;
  VertexSet w1;
  IndexBags ib;
};

HostView view_of(const LayeredGraph& g, const PathHost& host) {
  HostView hv;
  hv.in_u = mark(g.num_vertices(), host.u);
  hv.in_u0.assign(g.num_tree_nodes(), 0);
  for (TreeNode t : host.u0) hv.in_u0.at(t) = 1;
  for (Vertex v : host.u)
    if (hv.in_u0[g.bag(v)] && g.vertex_height(v) > host.h0) hv.w1.push_back(v);
  hv.ib = index_bags(g, hv.w1);
  return hv;
}

void check_anchor(const LayeredGraph& g, const PathHost& host, const HostView& hv) {
  if (host.s_root >= g.num_tree_nodes() || g.height(host.s_root) != host.h0)
    throw ContractError("anchor root must sit at height h0");
  for (TreeNode t : g.subtree_nodes(host.s_root)) {
    if (!hv.in_u0[t]) throw ContractError("anchor set is not inside W0");
    for (int i = 1; i <= g.k(); ++i)
      if (hv.in_u[g.vertex(t, i)]) throw ContractError("anchor set meets U");
  }
}

bool touches(const Graph& gr, const std::vector<char>& in_u, Vertex v) {
  for (Vertex w : gr.neighbors(v))
    if (in_u[w]) return true;
  return false;
}

// Drops the prefix of q before its last vertex adjacent to U.
std::vector<Vertex> trim_to_last_contact(const Graph& gr, const std::vector<char>& in_u, std::vector<Vertex> q) {
  std::size_t cut = q.size();
  for (std::size_t i = q.size(); i-- > 0;)
    if (touches(gr, in_u, q[i])) {
      cut = i;
      break;
    }
  if (cut == q.size()) throw ContractError("path never touches U");
  q.erase(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(cut));
  return q;
}

// Adds candidates one at a time, keeping each only if the family stays a
// valid independent family. Returns the number dropped.
std::size_t add_filtered(const LayeredGraph& g, PathFamily& fam, std::vector<AnchoredPath> cands,
                         const VertexSet& u, int h0) {
  std::size_t dropped = 0;
  for (auto& p : cands) {
    if (check_anchored_path(g, p, u, h0)) {
      ++dropped;
      continue;
    }
    fam.paths.push_back(std::move(p));
    if (check_family(g, fam, u, h0)) {
      fam.paths.pop_back();
      ++dropped;
    }
  }
  return dropped;
}

}  // namespace

// ---------------------------------------------------------------------------

Permutation::Permutation(const LayeredGraph& g, std::vector<Vertex> order) : order_(std::move(order)) {
  const std::size_t n = g.num_vertices();
  if (order_.size() != n)
    throw ContractError("permutation lists " + std::to_string(order_.size()) + " vertices, graph has " +
                        std::to_string(n));
  pos_.assign(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    Vertex v = order_[i];
    if (v >= n) throw ContractError("permutation names an unknown vertex");
    if (pos_[v] != n) throw ContractError("permutation repeats vertex " + g.graph().name(v));
    pos_[v] = i;
  }
}

VertexSet Permutation::prefix(std::size_t len) const {
  if (len > order_.size()) throw ContractError("prefix longer than the permutation");
  VertexSet s(order_.begin(), order_.begin() + static_cast<std::ptrdiff_t>(len));
  std::sort(s.begin(), s.end());
  return s;
}

Permutation bfs_order(const LayeredGraph& g) {
  // Heap numbering is already level order.
  std::vector<Vertex> order(g.num_vertices());
  std::iota(order.begin(), order.end(), Vertex{0});
  return Permutation(g, std::move(order));
}

Permutation dfs_order(const LayeredGraph& g) {
  std::vector<Vertex> order;
  order.reserve(g.num_vertices());
  std::vector<TreeNode> stack{LayeredGraph::kRoot};
  while (!stack.empty()) {
    TreeNode t = stack.back();
    stack.pop_back();
    for (int i = 1; i <= g.k(); ++i) order.push_back(g.vertex(t, i));
    auto ch = g.children(t);
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  return Permutation(g, std::move(order));
}

Permutation lexicographic_order(const LayeredGraph& g) { return complete_lexicographically(g, {}); }

Permutation complete_lexicographically(const LayeredGraph& g, const std::vector<Vertex>& prefix) {
  const auto& gr = g.graph();
  std::vector<char> used(g.num_vertices(), 0);
  std::vector<Vertex> order;
  order.reserve(g.num_vertices());
  for (Vertex v : prefix) {
    if (v >= used.size() || used[v]) throw ContractError("prefix repeats or names an unknown vertex");
    used[v] = 1;
    order.push_back(v);
  }
  std::vector<Vertex> rest;
  for (Vertex v = 0; v < used.size(); ++v)
    if (!used[v]) rest.push_back(v);
  std::sort(rest.begin(), rest.end(), [&](Vertex a, Vertex b) { return gr.name(a) < gr.name(b); });
  order.insert(order.end(), rest.begin(), rest.end());
  return Permutation(g, std::move(order));
}

int ceil_log3(int k) {
  int e = 0;
  for (long long p = 1; p < k; p *= 3) ++e;
  return e;
}

int ceil_log2(int h) {
  int e = 0;
  for (long long p = 1; p < h; p *= 2) ++e;
  return e;
}

IndexBags index_bags(const LayeredGraph& g, const VertexSet& u) {
  IndexBags r;
  for (Vertex v : u) {
    TreeNode t = g.bag(v);
    int i = g.index(v);
    r.index_t[t].push_back(i);
    r.bags_i[i].push_back(t);
  }
  for (auto& [t, is] : r.index_t) {
    std::sort(is.begin(), is.end());
    r.bags.push_back(t);
  }
  for (auto& [i, ts] : r.bags_i) {
    std::sort(ts.begin(), ts.end());
    r.index.push_back(i);
  }
  return r;
}

// ---------------------------------------------------------------------------
// td / bu

TdResult is_td(const LayeredGraph& g, const Permutation& pi, int h0, int h1) {
  if (h0 < 0 || h0 >= h1 || h1 > g.h()) throw ContractError("need 0 ≤ h0 < h1 ≤ h");
  const int k = g.k();
  TdResult res;
  for (TreeNode t : g.nodes_at_height(h1)) {
    TdRecord rec;
    rec.t = t;
    int count = 0;
    std::vector<TreeNode> touched_roots;
    std::vector<TreeNode> high_bags;
    for (std::size_t p = 0; p < pi.size(); ++p) {
      Vertex v = pi.at(p);
      TreeNode b = g.bag(v);
      if (!g.is_descendant(b, t)) continue;
      if (g.height(b) > h0) {
        high_bags.push_back(b);
        if (++count == k) {
          rec.prefix_len = p + 1;
          break;
        }
      } else {
        touched_roots.push_back(ancestor_at(g, b, h0));
      }
    }
    if (count < k) throw ContractError("permutation has fewer than k vertices above h0 under a node");
    std::sort(touched_roots.begin(), touched_roots.end());
    std::vector<std::pair<int, TreeNode>> ranked;
    for (TreeNode r : g.nodes_at_height(h0, t)) {
      if (std::binary_search(touched_roots.begin(), touched_roots.end(), r)) continue;
      int d = std::numeric_limits<int>::max();
      for (TreeNode b : high_bags) d = std::min(d, g.tree_distance(r, b));
      ranked.emplace_back(-d, r);
    }
    std::sort(ranked.begin(), ranked.end());
    for (const auto& [d, r] : ranked) rec.untouched_all.push_back(r);
    if (!ranked.empty())
      rec.untouched = ranked.front().second;
    else
      res.td = false;
    res.records.push_back(rec);
  }
  return res;
}

BuWitness bu_from_td_failure(const LayeredGraph& g, const Permutation& pi, int h0, int h1, TreeNode t0,
                             std::size_t td_prefix_len) {
  const int lk = ceil_log3(g.k());
  if (h0 < 0 || h0 + lk + 1 >= h1 || h1 > g.h())
    throw ContractError("need h0 + ⌈log₃ k⌉ + 1 < h1 ≤ h");
  if (t0 >= g.num_tree_nodes() || g.height(t0) != h1) throw ContractError("t0 must sit at height h1");
  if (td_prefix_len == 0 || td_prefix_len > pi.size()) throw ContractError("bad prefix length");
  const int h2 = h1 - lk;
  const std::size_t len = td_prefix_len - 1;

  auto cands = g.nodes_at_height(h2, t0);
  // Per candidate: hits above h0, and which height-h0 roots were hit.
  std::vector<int> high_hits(cands.size(), 0);
  std::vector<char> hit_root(g.num_tree_nodes(), 0);
  const TreeNode first = cands.front();
  for (std::size_t p = 0; p < len; ++p) {
    TreeNode b = g.bag(pi.at(p));
    if (!g.is_descendant(b, t0) || g.height(b) > h2) continue;
    TreeNode top = ancestor_at(g, b, h2);
    if (g.height(b) > h0)
      ++high_hits[top - first];
    else
      hit_root[ancestor_at(g, b, h0)] = 1;
  }
  for (std::size_t c = 0; c < cands.size(); ++c) {
    if (high_hits[c] != 0) continue;
    bool all = true;
    for (TreeNode r : g.nodes_at_height(h0, cands[c]))
      if (!hit_root[r]) {
        all = false;
        break;
      }
    if (all) return {cands[c], len, h2};
  }
  throw ContractError("t0 does not witness a td failure for this prefix");
}

bool check_bu(const LayeredGraph& g, const Permutation& pi, int h0, TreeNode t, std::size_t prefix_len) {
  VertexSet pre = pi.prefix(prefix_len);
  if (!set_disjoint(pre, strata(g, h0, StratumMode::kGt, t))) return false;
  for (const auto& s : subtree_family(g, h0, t))
    if (set_disjoint(pre, s.vertices)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Paths and families

VertexSet PathFamily::firsts() const {
  VertexSet s;
  for (const auto& p : paths) s.push_back(p.first());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

std::optional<std::string> check_anchored_path(const LayeredGraph& g, const AnchoredPath& p, const VertexSet& u,
                                               int h0) {
  const auto& gr = g.graph();
  const auto& vs = p.vertices;
  if (vs.empty()) return "empty path";
  for (Vertex v : vs)
    if (v >= g.num_vertices()) return "unknown vertex";
  for (std::size_t i = 0; i + 1 < vs.size(); ++i) {
    if (!gr.adjacent(vs[i], vs[i + 1])) return "consecutive vertices not adjacent";
    if (g.vertex_height(vs[i]) <= h0) return "inner vertex at height ≤ h0";
  }
  VertexSet sorted = vs;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return "path repeats a vertex";
  if (g.vertex_height(p.last()) != h0) return "last vertex not at height h0";
  if (p.anchor_root != g.bag(p.last())) return "anchor root is not the bag of the last vertex";
  auto in_u = mark(g.num_vertices(), u);
  for (Vertex v : vs)
    if (in_u[v]) return "path meets U";
  if (!set_disjoint(g.subtree_vertices(p.anchor_root), u)) return "anchor meets U";
  if (!touches(gr, in_u, p.first())) return "first vertex not adjacent to U";
  for (std::size_t i = 1; i < vs.size(); ++i)
    if (touches(gr, in_u, vs[i])) return "non-first vertex adjacent to U";
  return std::nullopt;
}

std::optional<std::string> check_family(const LayeredGraph& g, const PathFamily& f, const VertexSet& u, int h0) {
  for (const auto& p : f.paths)
    if (auto why = check_anchored_path(g, p, u, h0)) return why;
  const auto& gr = g.graph();
  VertexSet firsts = f.firsts();
  if (firsts.size() != f.paths.size()) return "two paths share a first vertex";
  if (!is_independent(gr, firsts)) return "first vertices not independent";
  VertexSet nu;
  for (Vertex x : firsts) {
    VertexSet part = neighbors_in(gr, x, u);
    nu.insert(nu.end(), part.begin(), part.end());
  }
  std::sort(nu.begin(), nu.end());
  nu.erase(std::unique(nu.begin(), nu.end()), nu.end());
  if (!is_independent(gr, nu)) return "U-neighbours of first vertices not independent";
  for (Vertex y : nu)
    if (neighbors_in(gr, y, firsts).size() != 1) return "a U vertex sees two first vertices";
  return std::nullopt;
}

VertexSet host_w1(const LayeredGraph& g, const PathHost& host) { return view_of(g, host).w1; }

AnchoredPath path_by_index(const LayeredGraph& g, const PathHost& host, int i) {
  HostView hv = view_of(g, host);
  auto it = hv.ib.bags_i.find(i);
  if (it == hv.ib.bags_i.end()) throw ContractError("index " + std::to_string(i) + " is not in Index(W1)");
  check_anchor(g, host, hv);
  TreeNode t1 = it->second.front();
  int best = g.tree_distance(t1, host.s_root);
  for (TreeNode t : it->second) {
    int d = g.tree_distance(t, host.s_root);
    if (d < best) best = d, t1 = t;
  }
  std::vector<Vertex> q = tree_path(g, t1, host.s_root, i);
  q.erase(q.begin());
  return {trim_to_last_contact(g.graph(), hv.in_u, std::move(q)), host.s_root};
}

AnchoredPath path_by_bag(const LayeredGraph& g, const PathHost& host, TreeNode t1, int j) {
  HostView hv = view_of(g, host);
  if (j < 1 || j > g.k()) throw ContractError("index out of range");
  for (int a : hv.ib.index)
    if (std::abs(a - j) < 2) throw ContractError("index j must be at distance ≥ 2 from Index(W1)");
  auto it = hv.ib.index_t.find(t1);
  if (it == hv.ib.index_t.end()) throw ContractError("t1 is not in Bags(W1)");
  check_anchor(g, host, hv);
  int i = it->second.front();
  for (int a : it->second)
    if (std::abs(a - j) < std::abs(i - j)) i = a;
  std::vector<Vertex> q = tree_path(g, t1, host.s_root, i, j);
  q.erase(q.begin());
  return {trim_to_last_contact(g.graph(), hv.in_u, std::move(q)), host.s_root};
}

FamilyResult family_by_index(const LayeredGraph& g, const PathHost& host) {
  HostView hv = view_of(g, host);
  FamilyResult r;
  r.branch = "index";
  r.candidates = hv.ib.index.size();
  std::vector<AnchoredPath> cands;
  int last = -100;
  for (int i : hv.ib.index) {
    if (i - last < 4) continue;
    last = i;
    cands.push_back(path_by_index(g, host, i));
  }
  r.dropped = add_filtered(g, r.family, std::move(cands), host.u, host.h0);
  return r;
}

FamilyResult family_by_bags(const LayeredGraph& g, const PathHost& host) {
  HostView hv = view_of(g, host);
  const int k = g.k();
  const int ni = static_cast<int>(hv.ib.index.size());
  if (ni * ni >= k) throw ContractError("bag construction needs |Index(W1)| < √k");
  FamilyResult r;
  r.branch = "bags";
  r.candidates = hv.ib.bags.size();

  std::vector<TreeNode> b0;
  for (TreeNode t : hv.ib.bags) {
    bool far = std::all_of(b0.begin(), b0.end(), [&](TreeNode s) { return g.tree_distance(s, t) >= 4; });
    if (far) b0.push_back(t);
  }
  const int cap = ceil_sqrt(k);
  std::vector<TreeNode> b1 = b0;
  if (static_cast<int>(b1.size()) * static_cast<int>(b1.size()) > k) b1.resize(static_cast<std::size_t>(cap));

  std::vector<int> free_idx;
  for (int j = 1; j <= k; ++j) {
    bool ok = std::all_of(hv.ib.index.begin(), hv.ib.index.end(), [&](int a) { return std::abs(a - j) >= 2; });
    if (ok && (free_idx.empty() || j - free_idx.back() >= 4)) free_idx.push_back(j);
  }
  if (free_idx.size() < b1.size())
    throw CapacityError("no spaced index map for " + std::to_string(b1.size()) + " bags with k = " +
                        std::to_string(k));

  std::vector<AnchoredPath> cands;
  for (std::size_t n = 0; n < b1.size(); ++n) {
    AnchoredPath p = path_by_bag(g, host, b1[n], free_idx[n]);
    if (g.bag(p.first()) != b1[n]) {
      ++r.dropped;
      continue;
    }
    cands.push_back(std::move(p));
  }
  r.dropped += add_filtered(g, r.family, std::move(cands), host.u, host.h0);
  return r;
}

FamilyResult family_dispatch(const LayeredGraph& g, const PathHost& host) {
  HostView hv = view_of(g, host);
  if (hv.w1.size() < static_cast<std::size_t>(g.k()))
    throw ContractError("need |U ∩ W0 ∩ V_{>h0}| ≥ k, have " + std::to_string(hv.w1.size()));
  const auto ni = static_cast<long long>(hv.ib.index.size());
  if (ni * ni >= g.k()) return family_by_index(g, host);
  std::size_t dropped = 0;
  try {
    FamilyResult r = family_by_bags(g, host);
    if (r.family.size() > 0) return r;
    dropped = r.dropped;
  } catch (const CapacityError&) {
  }
  FamilyResult r = family_by_index(g, host);
  r.branch = "bags->index";
  r.dropped += dropped;
  return r;
}

// ---------------------------------------------------------------------------
// Recursion and assemblies

double c_bound(int x0, int x1) {
  if (x1 < x0) return 0.0;
  return static_cast<double>((x1 - x0) / 4 + 1) / 65.0;
}

TopDownResult top_down_triple(const LayeredGraph& g, const Permutation& pi, int h0, int h1,
                              std::size_t anchor_pick) {
  TdResult td = is_td(g, pi, h0, h1);
  if (!td.td) throw ContractError("permutation is not (h0,h1)-td");
  std::vector<const TdRecord*> rec_of(g.num_tree_nodes(), nullptr);
  for (const auto& r : td.records) rec_of[r.t] = &r;

  std::function<TopDownResult(TreeNode)> rec = [&](TreeNode t) -> TopDownResult {
    const int ht = g.height(t);
    if (ht == h1) {
      const TdRecord& r = *rec_of[t];
      const TreeNode anchor = r.untouched_all[std::min(anchor_pick, r.untouched_all.size() - 1)];
      PathHost host{pi.prefix(r.prefix_len), g.subtree_nodes(t), anchor, h0};
      FamilyResult fr = family_dispatch(g, host);
      TopDownResult out;
      out.prefix_len = r.prefix_len;
      out.family = std::move(fr.family);
      out.anchor_root = anchor;
      out.sizes = {out.family.size()};
      out.dropped = fr.dropped;
      return out;
    }
    if ((ht - h1) % 4 != 0) return rec(leftmost_at(g, t, ht - (ht - h1) % 4));

    auto ch = g.children(t);
    std::array<TopDownResult, 3> sub;
    for (std::size_t c = 0; c < 3; ++c) sub[c] = rec(leftmost_at(g, ch[c], ht - 4));
    std::array<std::size_t, 3> ord{0, 1, 2};
    std::stable_sort(ord.begin(), ord.end(),
                     [&](std::size_t a, std::size_t b) { return sub[a].prefix_len < sub[b].prefix_len; });
    TopDownResult& mid = sub[ord[1]];
    const TopDownResult& top = sub[ord[2]];

    std::vector<TreeNode> u0;
    {
      auto all = g.subtree_nodes(t);
      auto cut = g.subtree_nodes(ch[ord[1]]);
      std::set_difference(all.begin(), all.end(), cut.begin(), cut.end(), std::back_inserter(u0));
    }
    PathHost host{pi.prefix(mid.prefix_len), std::move(u0), top.anchor_root, h0};
    FamilyResult fr = family_dispatch(g, host);

    TopDownResult out;
    out.prefix_len = mid.prefix_len;
    out.anchor_root = top.anchor_root;
    out.family = std::move(mid.family);
    out.dropped = mid.dropped + fr.dropped;
    out.dropped += add_filtered(g, out.family, std::move(fr.family.paths), host.u, h0);
    out.sizes = std::move(mid.sizes);
    out.sizes.push_back(out.family.size());
    return out;
  };
  return rec(LayeredGraph::kRoot);
}

TargetTriple assemble_top_down(const LayeredGraph& g, const PathFamily& family, const VertexSet& u, int h0,
                               std::size_t theta) {
  if (h0 < 1) throw CapacityError("top-down assembly needs h0 ≥ 1");
  if (tree_size(h0 - 1) * static_cast<std::uint64_t>(g.k()) <= theta)
    throw CapacityError("top-down assembly needs m(h0-1)·k > θ");
  if (family.paths.empty()) throw CapacityError("empty path family");
  TargetTriple tr;
  tr.w = u;
  tr.theta = theta;
  VertexSet u1;
  for (const auto& p : family.paths) {
    TreeNode t1 = 3 * p.anchor_root + 1;
    u1.insert(u1.end(), p.vertices.begin() + 1, p.vertices.end());
    u1.push_back(g.vertex(t1, g.index(p.last())));
    VertexSet sub = g.subtree_vertices(t1);
    u1.insert(u1.end(), sub.begin(), sub.end());
  }
  tr.u0 = family.firsts();
  tr.u1 = make_var_set(std::move(u1));
  return tr;
}

TargetTriple assemble_top_down_closure(const LayeredGraph& g, const PathFamily& family, const VertexSet& u,
                                       std::size_t theta) {
  const auto& gr = g.graph();
  auto in_u = mark(g.num_vertices(), u);
  VertexSet safe;
  for (Vertex v = 0; v < g.num_vertices(); ++v)
    if (!in_u[v] && !touches(gr, in_u, v)) safe.push_back(v);
  auto comps = components(gr, safe);
  std::vector<std::size_t> comp_of(g.num_vertices(), SIZE_MAX);
  for (std::size_t c = 0; c < comps.size(); ++c)
    for (Vertex v : comps[c]) comp_of[v] = c;

  std::vector<char> chosen(comps.size(), 0);
  VertexSet u0;
  for (const auto& p : family.paths) {
    std::size_t c = SIZE_MAX;
    if (p.vertices.size() >= 2) {
      c = comp_of[p.vertices[1]];
    } else {
      for (Vertex w : gr.neighbors(p.first())) {
        std::size_t cw = comp_of[w];
        if (cw != SIZE_MAX && (c == SIZE_MAX || comps[cw].size() > comps[c].size())) c = cw;
      }
    }
    if (c == SIZE_MAX || comps[c].size() <= theta) continue;
    chosen[c] = 1;
    u0.push_back(p.first());
  }
  if (u0.empty()) throw CapacityError("no path reaches a safe component larger than θ");
  TargetTriple tr;
  tr.w = u;
  tr.theta = theta;
  tr.u0 = make_var_set(std::move(u0));
  VertexSet u1;
  for (std::size_t c = 0; c < comps.size(); ++c)
    if (chosen[c]) u1.insert(u1.end(), comps[c].begin(), comps[c].end());
  tr.u1 = make_var_set(std::move(u1));
  return tr;
}

std::optional<TreeNode> easy_free_root(const LayeredGraph& g, const VertexSet& u, TreeNode t, int h0) {
  if (t >= g.num_tree_nodes() || h0 < 0 || g.height(t) < h0 + 2) return std::nullopt;
  std::vector<char> hit(g.num_tree_nodes(), 0);
  for (Vertex v : u) {
    TreeNode b = g.bag(v);
    if (!g.is_descendant(b, t)) continue;
    if (g.height(b) > h0) return std::nullopt;
    hit[ancestor_at(g, b, h0 + 1)] = 1;
  }
  std::optional<TreeNode> free;
  for (TreeNode r : g.nodes_at_height(h0 + 1, t)) {
    if (hit[r]) continue;
    if (free) return std::nullopt;
    free = r;
  }
  return free;
}

TargetTriple assemble_bottom_up(const LayeredGraph& g, const VertexSet& u, TreeNode t, int h0, std::size_t theta) {
  auto free = easy_free_root(g, u, t, h0);
  if (!free) throw ContractError("U is not easy on t");
  if (tree_size(h0 + 1) * static_cast<std::uint64_t>(g.k()) <= theta)
    throw CapacityError("bottom-up assembly needs m(h0+1)·k > θ");
  const auto& gr = g.graph();
  const TreeNode root_u = ancestor_at(g, *free, g.height(t) - 1);

  // w(S) for each loaded S: the highest vertex of S ∩ U, ties to the
  // smaller id string.
  std::vector<std::optional<Vertex>> w_of(g.num_tree_nodes());
  for (Vertex v : u) {
    TreeNode b = g.bag(v);
    if (!g.is_descendant(b, root_u)) continue;
    TreeNode r = ancestor_at(g, b, h0 + 1);
    auto& cur = w_of[r];
    if (!cur || g.vertex_height(v) > g.vertex_height(*cur) ||
        (g.vertex_height(v) == g.vertex_height(*cur) && gr.name(v) < gr.name(*cur)))
      cur = v;
  }

  TargetTriple tr;
  tr.w = u;
  tr.theta = theta;
  VertexSet u0, u1;
  for (TreeNode r : g.nodes_at_height(h0 + 1, root_u)) {
    if (r == *free) continue;
    Vertex w = *w_of[r];
    std::vector<Vertex> ps = tree_path(g, g.bag(w), root_u, g.index(w));
    ps.erase(ps.begin());
    if (ps.size() < 2) throw CapacityError("P*(S) is empty; bottom-up assembly needs h2 ≥ h0 + 3");
    u0.push_back(ps.front());
    u1.insert(u1.end(), ps.begin() + 1, ps.end());
  }
  for (int i = 1; i <= g.k(); ++i) u1.push_back(g.vertex(root_u, i));
  VertexSet fv = g.subtree_vertices(*free);
  u1.insert(u1.end(), fv.begin(), fv.end());
  std::vector<Vertex> pu = tree_path(g, root_u, *free, 1);
  u1.insert(u1.end(), pu.begin(), pu.end());
  if (u0.empty()) throw CapacityError("no loaded sets; bottom-up assembly needs h2 ≥ h0 + 3");
  tr.u0 = make_var_set(std::move(u0));
  tr.u1 = make_var_set(std::move(u1));
  return tr;
}

// ---------------------------------------------------------------------------
// Pipeline

namespace {

bool alpha_fits(int h, int k, double alpha) {
  const int h0 = static_cast<int>(std::ceil(alpha * h - 1e-9)) + 2;
  const int h1 = h0 + 2 * ceil_log3(k) + ceil_log2(h);
  const double need = 2.0 * (ceil_log2(h) + 2 * ceil_log3(k) + 2) / (1.0 - alpha);
  return h >= need - 1e-9 && h1 <= h;
}

}  // namespace

int min_height_for_alpha(int k, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ContractError("α must lie in (0,1)");
  // The bound grows like log h while the left side grows like h, so a fixed
  // scan range is enough for any α not extremely close to 1.
  for (int h = 1; h <= 100000; ++h)
    if (alpha_fits(h, k, alpha)) return h;
  throw CapacityError("no admissible height for this α");
}

Schedule alpha_schedule(int h, int k, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ContractError("α must lie in (0,1)");
  if (!alpha_fits(h, k, alpha))
    throw CapacityError("α schedule does not fit at h = " + std::to_string(h) + "; needs h ≥ " +
                        std::to_string(min_height_for_alpha(k, alpha)));
  Schedule s;
  s.h0 = static_cast<int>(std::ceil(alpha * h - 1e-9)) + 2;
  s.h1 = s.h0 + 2 * ceil_log3(k) + ceil_log2(h);
  return s;
}

AnalysisResult analyze(const LayeredGraph& g, const Permutation& pi, const AnalysisParams& params) {
  Schedule sc;
  if (params.alpha) {
    if (params.h0 || params.h1) throw ContractError("give either α or (h0,h1), not both");
    sc = alpha_schedule(g.h(), g.k(), *params.alpha);
  } else {
    if (!params.h0 || !params.h1) throw ContractError("missing h0/h1");
    sc = {*params.h0, *params.h1};
  }
  if (sc.h0 < 0 || sc.h0 >= sc.h1 || sc.h1 > g.h()) throw ContractError("need 0 ≤ h0 < h1 ≤ h");

  AnalysisResult res;
  res.h0 = sc.h0;
  res.h1 = sc.h1;
  const double sqk = std::sqrt(static_cast<double>(g.k()));
  TdResult td = is_td(g, pi, sc.h0, sc.h1);
  if (td.td) {
    // Any untouched set may serve as the anchor; walk the preference list
    // until one of the two assemblies goes through.
    std::size_t picks = 0;
    for (const auto& r : td.records) picks = std::max(picks, r.untouched_all.size());
    std::optional<CapacityError> last_err;
    for (std::size_t pick = 0; pick < picks && res.branch.empty(); ++pick) {
      TopDownResult tdr = top_down_triple(g, pi, sc.h0, sc.h1, pick);
      VertexSet u = pi.prefix(tdr.prefix_len);
      res.prefix_len = tdr.prefix_len;
      res.family_size = tdr.family.size();
      res.dropped = tdr.dropped;
      res.anchor_pick = pick;
      try {
        res.triple = assemble_top_down(g, tdr.family, u, sc.h0, params.theta);
        res.branch = "td";
      } catch (const CapacityError&) {
        try {
          res.triple = assemble_top_down_closure(g, tdr.family, u, params.theta);
          res.branch = "td-closure";
        } catch (const CapacityError& e) {
          last_err = e;
        }
      }
    }
    if (res.branch.empty()) throw *last_err;
    res.bound_c = c_bound(sc.h1, g.h()) * sqk;
    res.bound_260 = (g.h() - sc.h1) * sqk / 260.0;
  } else {
    const TdRecord* bad = nullptr;
    for (const auto& r : td.records)
      if (!r.untouched) {
        bad = &r;
        break;
      }
    BuWitness bw = bu_from_td_failure(g, pi, sc.h0, sc.h1, bad->t, bad->prefix_len);
    // Shortest prefix meeting every set of S_{h0+1}(h,k,t), minus its last element.
    auto roots = g.nodes_at_height(sc.h0 + 1, bw.t);
    std::vector<char> hit(g.num_tree_nodes(), 0);
    std::size_t remaining = roots.size();
    std::size_t len = 0;
    for (std::size_t p = 0; p < bw.prefix_len && remaining > 0; ++p) {
      TreeNode b = g.bag(pi.at(p));
      if (!g.is_descendant(b, bw.t)) continue;
      TreeNode r = ancestor_at(g, b, sc.h0 + 1);
      if (!hit[r]) {
        hit[r] = 1;
        if (--remaining == 0) len = p + 1;
      }
    }
    if (remaining != 0) throw ContractError("bu prefix misses a subtree set");
    res.branch = "bu";
    res.h2 = bw.h2;
    res.bu_node = bw.t;
    res.prefix_len = len - 1;
    res.triple = assemble_bottom_up(g, pi.prefix(len - 1), bw.t, sc.h0, params.theta);
  }
  res.rank = res.triple.rank();
  res.report = validate_triple(g.graph(), res.triple);
  return res;
}

}  // namespace dnnflab
