#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dnnflab/cnf.hpp"
#include "dnnflab/graph.hpp"

namespace dnnflab {

/// Node of the complete ternary tree, numbered in heap order: the root is 0
/// and the children of t are 3t+1, 3t+2, 3t+3.
using TreeNode = std::uint32_t;

/// m(h) = |V(T[h])| = (3^(h+1) - 1) / 2.
std::uint64_t tree_size(int h);

/// Complete rooted ternary tree of height h; vertex names are tree codes
/// ("@" for the root, else the root-to-node child-digit string).
Graph ternary_tree(int h);

enum class StratumMode { kEq, kGt, kLt, kGeq, kLeq };

/// A member of a subtree family: V(h,k,root) together with its root.
struct SubtreeSet {
  TreeNode root = 0;
  VertexSet vertices;
};

/// T[h,k] = T[h] □ P_k with canonical coordinates. Vertex (t,i), i ∈ [k],
/// has index t·k + (i-1) and name "<code(t)>:<i>".
class LayeredGraph {
 public:
  LayeredGraph(int h, int k);

  int h() const noexcept { return h_; }
  int k() const noexcept { return k_; }
  const Graph& graph() const noexcept { return graph_; }
  std::size_t num_tree_nodes() const noexcept { return tree_nodes_; }
  std::size_t num_vertices() const noexcept { return graph_.num_vertices(); }

  Vertex vertex(TreeNode t, int i) const;
  TreeNode bag(Vertex v) const { return v / static_cast<Vertex>(k_); }
  int index(Vertex v) const { return static_cast<int>(v % static_cast<Vertex>(k_)) + 1; }

  static constexpr TreeNode kRoot = 0;
  int depth(TreeNode t) const;
  int height(TreeNode t) const { return h_ - depth(t); }
  int vertex_height(Vertex v) const { return height(bag(v)); }
  std::optional<TreeNode> parent(TreeNode t) const;
  /// Children in digit order 0,1,2; empty for leaves.
  std::vector<TreeNode> children(TreeNode t) const;
  bool is_descendant(TreeNode t, TreeNode ancestor) const;
  std::string code(TreeNode t) const;
  std::optional<TreeNode> node_from_code(const std::string& code) const;

  /// Descendants of t (t included) at height exactly a, in heap order.
  std::vector<TreeNode> nodes_at_height(int a, TreeNode under = kRoot) const;
  /// V(h,t): all descendants of t, t included, in heap order.
  std::vector<TreeNode> subtree_nodes(TreeNode t) const;
  /// V(h,k,t).
  VertexSet subtree_vertices(TreeNode t) const;
  /// nodes × [k].
  VertexSet product_with_path(const std::vector<TreeNode>& nodes) const;

  /// Unique tree path from a to b, endpoints included.
  std::vector<TreeNode> node_path(TreeNode a, TreeNode b) const;
  int tree_distance(TreeNode a, TreeNode b) const;

 private:
  int h_;
  int k_;
  std::size_t tree_nodes_;
  Graph graph_;
};

LayeredGraph build_thk(int h, int k);

/// Recognizes a graph in canonical T[h,k] naming (as written by the CLI) and
/// rebuilds the layered view; throws ContractError if it is anything else.
LayeredGraph recognize_thk(const Graph& g);

/// V_a(h,k) and friends, restricted to descendants of t when given.
/// Throws ContractError for a outside [0,h].
VertexSet strata(const LayeredGraph& g, int a, StratumMode mode,
                 std::optional<TreeNode> t = std::nullopt);

/// S_a(h,k,t): one set V(h,k,t') per descendant t' of t at height a.
/// Throws ContractError if a > height(t).
std::vector<SubtreeSet> subtree_family(const LayeredGraph& g, int a, TreeNode t);

/// Without j: P(t0,t1) × i. With j: the hook P(t0,t1,i,j), which walks
/// t0 × (i..j) and then P(t0,t1) × j.
std::vector<Vertex> tree_path(const LayeredGraph& g, TreeNode t0, TreeNode t1, int i,
                              std::optional<int> j = std::nullopt);

/// φ(G): one positive 2-clause (u ∨ v) per edge, variable of v is v.
/// Throws ContractError if G has an isolated vertex.
Cnf encode_cnf(const Graph& g);

/// Vertices v with a neighbour u such that g(u) = 0.
VertexSet fixed_vertices(const Graph& g, const Assignment& a);

/// g_u: extends g with u ← 0 and every other unassigned vertex ← 1.
/// Requires g to falsify no clause of φ(G), u ∉ Var(g) and u unfixed.
Assignment extend_unfixed(const Graph& g, const Assignment& a, Vertex u);

/// A tree decomposition with named bags.
struct TreeDecomposition {
  std::vector<std::string> bag_names;
  std::vector<VertexSet> bags;
  std::vector<std::pair<std::size_t, std::size_t>> tree;  // edges between bag indices

  std::size_t width() const;
};

/// Bags {t, parent(t)} × [k] for every non-root t, linked like T[h]; the
/// three bags under the root are chained through the first one. Width 2k-1.
/// For h = 0 the single bag holds every vertex.
TreeDecomposition tree_decomposition_thk(const LayeredGraph& g);

struct DecompositionCheck {
  bool is_tree = false;
  bool covers_vertices = false;
  bool covers_edges = false;
  bool connected_occurrences = false;
  bool ok() const { return is_tree && covers_vertices && covers_edges && connected_occurrences; }
};

DecompositionCheck validate_decomposition(const Graph& g, const TreeDecomposition& td);

}  // namespace dnnflab
