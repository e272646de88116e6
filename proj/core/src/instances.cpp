#include "dnnflab/instances.hpp"

#include <algorithm>
#include <numeric>

#include "dnnflab/error.hpp"

namespace dnnflab {

namespace {

std::uint64_t pow3(int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) r *= 3;
  return r;
}

std::string code_of(TreeNode t) {
  if (t == 0) return "@";
  std::string digits;
  while (t != 0) {
    digits.push_back(static_cast<char>('0' + (t - 1) % 3));
    t = (t - 1) / 3;
  }
  std::reverse(digits.begin(), digits.end());
  return digits;
}

}  // namespace

std::uint64_t tree_size(int h) {
  if (h < 0) throw ContractError("negative tree height");
  if (h > 38) throw CapacityError("tree height " + std::to_string(h) + " overflows 64-bit counts");
  return (pow3(h + 1) - 1) / 2;
}

Graph ternary_tree(int h) {
  const std::uint64_t m = tree_size(h);
  if (m > (1u << 24)) throw CapacityError("ternary tree of height " + std::to_string(h) + " is too large to build");
  std::vector<std::string> names;
  std::vector<Edge> edges;
  names.reserve(m);
  for (TreeNode t = 0; t < m; ++t) {
    names.push_back(code_of(t));
    if (t != 0) edges.emplace_back((t - 1) / 3, t);
  }
  return Graph(std::move(names), std::move(edges));
}

LayeredGraph::LayeredGraph(int h, int k) : h_(h), k_(k) {
  if (h < 0) throw ContractError("h must be non-negative");
  if (k < 1) throw ContractError("k must be at least 1");
  tree_nodes_ = tree_size(h);
  if (tree_nodes_ * static_cast<std::uint64_t>(k) > (1u << 24))
    throw CapacityError("T[" + std::to_string(h) + "," + std::to_string(k) + "] is too large to build");
  graph_ = cartesian_product(ternary_tree(h), path_graph(static_cast<std::size_t>(k)));
}

Vertex LayeredGraph::vertex(TreeNode t, int i) const {
  if (t >= tree_nodes_ || i < 1 || i > k_)
    throw ContractError("invalid coordinate (" + std::to_string(t) + "," + std::to_string(i) + ")");
  return static_cast<Vertex>(t * static_cast<Vertex>(k_) + static_cast<Vertex>(i - 1));
}

int LayeredGraph::depth(TreeNode t) const {
  if (t >= tree_nodes_) throw ContractError("invalid tree node " + std::to_string(t));
  int d = 0;
  while (t != 0) {
    t = (t - 1) / 3;
    ++d;
  }
  return d;
}

std::optional<TreeNode> LayeredGraph::parent(TreeNode t) const {
  if (t >= tree_nodes_) throw ContractError("invalid tree node " + std::to_string(t));
  if (t == 0) return std::nullopt;
  return (t - 1) / 3;
}

std::vector<TreeNode> LayeredGraph::children(TreeNode t) const {
  if (height(t) == 0) return {};
  return {3 * t + 1, 3 * t + 2, 3 * t + 3};
}

bool LayeredGraph::is_descendant(TreeNode t, TreeNode ancestor) const {
  if (t >= tree_nodes_ || ancestor >= tree_nodes_) throw ContractError("invalid tree node");
  while (t > ancestor) t = (t - 1) / 3;
  return t == ancestor;
}

std::string LayeredGraph::code(TreeNode t) const {
  if (t >= tree_nodes_) throw ContractError("invalid tree node " + std::to_string(t));
  return code_of(t);
}

std::optional<TreeNode> LayeredGraph::node_from_code(const std::string& code) const {
  if (code == "@") return kRoot;
  if (code.empty() || static_cast<int>(code.size()) > h_) return std::nullopt;
  TreeNode t = 0;
  for (char c : code) {
    if (c < '0' || c > '2') return std::nullopt;
    t = 3 * t + 1 + static_cast<TreeNode>(c - '0');
  }
  return t;
}

std::vector<TreeNode> LayeredGraph::nodes_at_height(int a, TreeNode under) const {
  const int hu = height(under);
  if (a < 0 || a > hu) return {};
  // Descendants at relative depth d form a contiguous heap range.
  TreeNode lo = under, hi = under;
  for (int d = 0; d < hu - a; ++d) {
    lo = 3 * lo + 1;
    hi = 3 * hi + 3;
  }
  std::vector<TreeNode> out(hi - lo + 1);
  std::iota(out.begin(), out.end(), lo);
  return out;
}

std::vector<TreeNode> LayeredGraph::subtree_nodes(TreeNode t) const {
  std::vector<TreeNode> out;
  for (int a = height(t); a >= 0; --a) {
    auto level = nodes_at_height(a, t);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

VertexSet LayeredGraph::subtree_vertices(TreeNode t) const { return product_with_path(subtree_nodes(t)); }

VertexSet LayeredGraph::product_with_path(const std::vector<TreeNode>& nodes) const {
  std::vector<Vertex> out;
  out.reserve(nodes.size() * static_cast<std::size_t>(k_));
  for (TreeNode t : nodes)
    for (int i = 1; i <= k_; ++i) out.push_back(vertex(t, i));
  return make_var_set(std::move(out));
}

std::vector<TreeNode> LayeredGraph::node_path(TreeNode a, TreeNode b) const {
  if (a >= tree_nodes_ || b >= tree_nodes_) throw ContractError("invalid tree node");
  std::vector<TreeNode> up, down;
  while (a != b) {
    if (a > b) {
      up.push_back(a);
      a = (a - 1) / 3;
    } else {
      down.push_back(b);
      b = (b - 1) / 3;
    }
  }
  up.push_back(a);
  up.insert(up.end(), down.rbegin(), down.rend());
  return up;
}

int LayeredGraph::tree_distance(TreeNode a, TreeNode b) const {
  return static_cast<int>(node_path(a, b).size()) - 1;
}

LayeredGraph build_thk(int h, int k) { return LayeredGraph(h, k); }

LayeredGraph recognize_thk(const Graph& g) {
  // Infer (h,k) from the names, then demand an exact match of the rebuilt graph.
  int h = 0, k = 0;
  for (const auto& name : g.names()) {
    auto colon = name.rfind(':');
    if (colon == std::string::npos) throw ContractError("vertex '" + name + "' is not a T[h,k] coordinate");
    std::string code = name.substr(0, colon);
    int i = 0;
    try {
      i = std::stoi(name.substr(colon + 1));
    } catch (const std::exception&) {
      throw ContractError("vertex '" + name + "' is not a T[h,k] coordinate");
    }
    k = std::max(k, i);
    if (code != "@") h = std::max(h, static_cast<int>(code.size()));
  }
  if (k == 0) throw ContractError("graph has no vertices");
  LayeredGraph lg(h, k);
  if (lg.num_vertices() != g.num_vertices() || lg.graph().num_edges() != g.num_edges())
    throw ContractError("graph is not T[" + std::to_string(h) + "," + std::to_string(k) + "]");
  for (auto [u, v] : g.edges()) {
    auto a = lg.graph().find(g.name(u));
    auto b = lg.graph().find(g.name(v));
    if (!a || !b || !lg.graph().adjacent(*a, *b))
      throw ContractError("graph is not T[" + std::to_string(h) + "," + std::to_string(k) + "]");
  }
  return lg;
}

VertexSet strata(const LayeredGraph& g, int a, StratumMode mode, std::optional<TreeNode> t) {
  if (a < 0 || a > g.h()) throw ContractError("height " + std::to_string(a) + " outside [0," + std::to_string(g.h()) + "]");
  const TreeNode under = t.value_or(LayeredGraph::kRoot);
  const int top = g.height(under);
  std::vector<TreeNode> nodes;
  for (int b = 0; b <= top; ++b) {
    bool take = false;
    switch (mode) {
      case StratumMode::kEq: take = b == a; break;
      case StratumMode::kGt: take = b > a; break;
      case StratumMode::kLt: take = b < a; break;
      case StratumMode::kGeq: take = b >= a; break;
      case StratumMode::kLeq: take = b <= a; break;
    }
    if (!take) continue;
    auto level = g.nodes_at_height(b, under);
    nodes.insert(nodes.end(), level.begin(), level.end());
  }
  return g.product_with_path(nodes);
}

std::vector<SubtreeSet> subtree_family(const LayeredGraph& g, int a, TreeNode t) {
  if (a < 0 || a > g.height(t))
    throw ContractError("height " + std::to_string(a) + " exceeds height of node " + g.code(t));
  std::vector<SubtreeSet> out;
  for (TreeNode r : g.nodes_at_height(a, t)) out.push_back({r, g.subtree_vertices(r)});
  return out;
}

std::vector<Vertex> tree_path(const LayeredGraph& g, TreeNode t0, TreeNode t1, int i, std::optional<int> j) {
  if (i < 1 || i > g.k() || (j && (*j < 1 || *j > g.k()))) throw ContractError("path index out of range");
  std::vector<Vertex> out;
  const int last = j.value_or(i);
  const int step = last >= i ? 1 : -1;
  for (int x = i; x != last; x += step) out.push_back(g.vertex(t0, x));
  for (TreeNode t : g.node_path(t0, t1)) out.push_back(g.vertex(t, last));
  return out;
}

Cnf encode_cnf(const Graph& g) {
  for (Vertex v = 0; v < g.num_vertices(); ++v)
    if (g.degree(v) == 0) throw ContractError("isolated vertex '" + g.name(v) + "' cannot be encoded");
  Cnf cnf;
  cnf.num_vars = static_cast<std::uint32_t>(g.num_vertices());
  cnf.clauses.reserve(g.num_edges());
  for (auto [u, v] : g.edges()) cnf.clauses.push_back({Literal{u, true}, Literal{v, true}});
  return cnf;
}

VertexSet fixed_vertices(const Graph& g, const Assignment& a) {
  std::vector<Vertex> out;
  for (auto [v, bit] : a.bindings()) {
    if (v >= g.num_vertices()) throw ContractError("assignment mentions a non-vertex");
    if (!bit)
      for (Vertex w : g.neighbors(v)) out.push_back(w);
  }
  return make_var_set(std::move(out));
}

Assignment extend_unfixed(const Graph& g, const Assignment& a, Vertex u) {
  if (u >= g.num_vertices()) throw ContractError("unknown vertex");
  if (a.binds(u)) throw ContractError("vertex '" + g.name(u) + "' is already assigned");
  if (set_contains(fixed_vertices(g, a), u)) throw ContractError("vertex '" + g.name(u) + "' is fixed");
  for (auto [x, y] : g.edges()) {
    if (a.value(x) == false && a.value(y) == false)
      throw ContractError("assignment falsifies clause (" + g.name(x) + " v " + g.name(y) + ")");
  }
  std::vector<Binding> b(a.bindings().begin(), a.bindings().end());
  for (Vertex v = 0; v < g.num_vertices(); ++v)
    if (!a.binds(v)) b.emplace_back(v, v != u);
  return Assignment::from_bindings(std::move(b));
}

std::size_t TreeDecomposition::width() const {
  std::size_t w = 0;
  for (const auto& b : bags) w = std::max(w, b.size());
  return w == 0 ? 0 : w - 1;
}

TreeDecomposition tree_decomposition_thk(const LayeredGraph& g) {
  TreeDecomposition td;
  if (g.h() == 0) {
    td.bag_names.push_back(g.code(LayeredGraph::kRoot));
    td.bags.push_back(g.graph().all_vertices());
    return td;
  }
  // Bag index of tree node t is t-1.
  for (TreeNode t = 1; t < g.num_tree_nodes(); ++t) {
    td.bag_names.push_back(g.code(t));
    td.bags.push_back(g.product_with_path({t, *g.parent(t)}));
    TreeNode p = *g.parent(t);
    if (p != LayeredGraph::kRoot)
      td.tree.emplace_back(p - 1, t - 1);
    else if (t != 1)
      td.tree.emplace_back(0, t - 1);
  }
  return td;
}

DecompositionCheck validate_decomposition(const Graph& g, const TreeDecomposition& td) {
  DecompositionCheck c;
  const std::size_t nb = td.bags.size();
  // Tree: nb-1 edges, connected.
  std::vector<std::vector<std::size_t>> adj(nb);
  bool edges_ok = td.tree.size() + 1 == nb || (nb == 0 && td.tree.empty());
  for (auto [a, b] : td.tree) {
    if (a >= nb || b >= nb || a == b) {
      edges_ok = false;
      continue;
    }
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  if (edges_ok && nb > 0) {
    std::vector<char> seen(nb, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t count = 0;
    while (!stack.empty()) {
      auto x = stack.back();
      stack.pop_back();
      ++count;
      for (auto y : adj[x])
        if (!seen[y]) seen[y] = 1, stack.push_back(y);
    }
    edges_ok = count == nb;
  }
  c.is_tree = edges_ok;

  std::vector<std::vector<std::size_t>> where(g.num_vertices());
  for (std::size_t b = 0; b < nb; ++b)
    for (Vertex v : td.bags[b])
      if (v < g.num_vertices()) where[v].push_back(b);
  c.covers_vertices = std::all_of(where.begin(), where.end(), [](const auto& w) { return !w.empty(); });

  c.covers_edges = true;
  for (auto [u, v] : g.edges()) {
    bool found = false;
    for (auto b : where[u])
      if (set_contains(td.bags[b], v)) {
        found = true;
        break;
      }
    if (!found) {
      c.covers_edges = false;
      break;
    }
  }

  c.connected_occurrences = c.is_tree;
  if (c.is_tree) {
    for (Vertex v = 0; v < g.num_vertices() && c.connected_occurrences; ++v) {
      const auto& w = where[v];
      if (w.empty()) continue;
      std::vector<char> in(nb, 0), seen(nb, 0);
      for (auto b : w) in[b] = 1;
      std::vector<std::size_t> stack{w.front()};
      seen[w.front()] = 1;
      std::size_t count = 0;
      while (!stack.empty()) {
        auto x = stack.back();
        stack.pop_back();
        ++count;
        for (auto y : adj[x])
          if (in[y] && !seen[y]) seen[y] = 1, stack.push_back(y);
      }
      if (count != w.size()) c.connected_occurrences = false;
    }
  }
  return c;
}

}  // namespace dnnflab
