#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dnnflab/instances.hpp"
#include "dnnflab/triples.hpp"

namespace dnnflab {

/// A linear order of all vertices of a layered graph.
class Permutation {
 public:
  /// Throws ContractError unless `order` lists every vertex exactly once.
  Permutation(const LayeredGraph& g, std::vector<Vertex> order);

  std::size_t size() const noexcept { return order_.size(); }
  const std::vector<Vertex>& order() const noexcept { return order_; }
  Vertex at(std::size_t i) const { return order_.at(i); }
  std::size_t position(Vertex v) const { return pos_.at(v); }
  /// The first `len` vertices as a set.
  VertexSet prefix(std::size_t len) const;

 private:
  std::vector<Vertex> order_;
  std::vector<std::size_t> pos_;
};

/// Breadth-first over tree levels, root first, path index innermost.
Permutation bfs_order(const LayeredGraph& g);
/// Pre-order over the tree (child digits ascending), path index innermost.
Permutation dfs_order(const LayeredGraph& g);
/// Vertices sorted by their id string.
Permutation lexicographic_order(const LayeredGraph& g);
/// Extends a duplicate-free prefix with the remaining vertices in id order.
Permutation complete_lexicographically(const LayeredGraph& g, const std::vector<Vertex>& prefix);

/// ⌈log₃ k⌉ and ⌈log₂ h⌉ as integers.
int ceil_log3(int k);
int ceil_log2(int h);

struct IndexBags {
  std::vector<int> index;                      // Index(U)
  std::vector<TreeNode> bags;                  // Bags(U)
  std::map<TreeNode, std::vector<int>> index_t;  // Index_t(U)
  std::map<int, std::vector<TreeNode>> bags_i;   // Bags_i(U)
};

IndexBags index_bags(const LayeredGraph& g, const VertexSet& u);

// ---------------------------------------------------------------------------
// td / bu classification

struct TdRecord {
  TreeNode t = 0;
  /// Length of the shortest prefix with k vertices in V_{>h0}(h,k,t).
  std::size_t prefix_len = 0;
  /// Root of the chosen untouched set of S_{h0}(h,k,t), if any. Among the
  /// untouched sets the one farthest (in the tree) from the touched bags of
  /// V_{>h0}(h,k,t) is chosen, ties to the smaller node.
  std::optional<TreeNode> untouched;
  /// Every untouched root, in the same preference order.
  std::vector<TreeNode> untouched_all;
};

struct TdResult {
  bool td = true;
  std::vector<TdRecord> records;  // one per t ∈ V_{h1}(h), heap order
};

/// Requires h0 < h1 ≤ h.
TdResult is_td(const LayeredGraph& g, const Permutation& pi, int h0, int h1);

struct BuWitness {
  TreeNode t = 0;         // height h2 = h1 - ⌈log₃ k⌉
  std::size_t prefix_len = 0;
  int h2 = 0;
};

/// The duality step. Requires h0 + ⌈log₃ k⌉ + 1 < h1 ≤ h and that t0 fails
/// the td test with shortest prefix length `td_prefix_len`.
BuWitness bu_from_td_failure(const LayeredGraph& g, const Permutation& pi, int h0, int h1, TreeNode t0,
                             std::size_t td_prefix_len);

/// Direct check of the bu definition for one (t, prefix): the prefix meets
/// every set of S_{h0}(h,k,t) and avoids V_{>h0}(h,k,t).
bool check_bu(const LayeredGraph& g, const Permutation& pi, int h0, TreeNode t, std::size_t prefix_len);

// ---------------------------------------------------------------------------
// U,h0-paths and families

struct AnchoredPath {
  std::vector<Vertex> vertices;  // first(P) ... last(P)
  TreeNode anchor_root = 0;      // root(anchor(P)) = bag(last(P))

  Vertex first() const { return vertices.front(); }
  Vertex last() const { return vertices.back(); }
};

struct PathFamily {
  std::vector<AnchoredPath> paths;

  std::size_t size() const { return paths.size(); }
  VertexSet firsts() const;
};

/// Why a path fails the U,h0-path definition, or nullopt if it passes.
std::optional<std::string> check_anchored_path(const LayeredGraph& g, const AnchoredPath& p, const VertexSet& u,
                                               int h0);
/// Every path valid and the three independence conditions hold.
std::optional<std::string> check_family(const LayeredGraph& g, const PathFamily& f, const VertexSet& u, int h0);

/// Host description shared by the path constructions: the set U, the
/// connected tree set U0 (W0 = U0 × [k]) and the anchor S = V(h,k,s_root).
struct PathHost {
  VertexSet u;
  std::vector<TreeNode> u0;  // sorted
  TreeNode s_root = 0;
  int h0 = 0;
};

/// W1 = U ∩ W0 ∩ V_{>h0}(h,k).
VertexSet host_w1(const LayeredGraph& g, const PathHost& host);

AnchoredPath path_by_index(const LayeredGraph& g, const PathHost& host, int i);
AnchoredPath path_by_bag(const LayeredGraph& g, const PathHost& host, TreeNode t1, int j);

struct FamilyResult {
  PathFamily family;
  std::string branch;        // "index", "bags" or "bags->index"
  std::size_t candidates = 0;  // |I| for the index branch, |B| for the bags branch
  std::size_t dropped = 0;     // paths removed by the validator filter
};

FamilyResult family_by_index(const LayeredGraph& g, const PathHost& host);
/// Throws CapacityError when no spaced index map exists (k too small).
FamilyResult family_by_bags(const LayeredGraph& g, const PathHost& host);
/// Requires |W1| ≥ k. Uses the index construction when |I| ≥ √k and the
/// bag construction otherwise, falling back to the index construction if
/// the bag construction is infeasible or yields no path.
FamilyResult family_dispatch(const LayeredGraph& g, const PathHost& host);

// ---------------------------------------------------------------------------
// Top-down recursion and assemblies

struct TopDownResult {
  std::size_t prefix_len = 0;
  PathFamily family;
  TreeNode anchor_root = 0;
  /// Family size after each level of the recursion, deepest first.
  std::vector<std::size_t> sizes;
  std::size_t dropped = 0;
};

/// c(x0,x1) = (⌊(x1-x0)/4⌋ + 1) / 65.
double c_bound(int x0, int x1);

/// Requires π to be (h0,h1)-td. Base cases anchor at the `anchor_pick`-th
/// preferred untouched set (clamped to the last one).
TopDownResult top_down_triple(const LayeredGraph& g, const Permutation& pi, int h0, int h1,
                              std::size_t anchor_pick = 0);

/// U0 = first(P), U1 = ⋃ V(shift(P)) ∪ V(h,k,t1(P)) with t1(P) the 0-child
/// of root(anchor(P)). Throws CapacityError unless h0 ≥ 1 and m(h0-1)·k > θ.
TargetTriple assemble_top_down(const LayeredGraph& g, const PathFamily& family, const VertexSet& u, int h0,
                               std::size_t theta);

/// Fallback for small h0: U1(P) is the component of G - (U ∪ N(U)) holding
/// P minus first(P) (or the largest such component next to first(P) for a
/// one-vertex path). Paths whose component has at most θ vertices are
/// dropped; throws CapacityError if none survive.
TargetTriple assemble_top_down_closure(const LayeredGraph& g, const PathFamily& family, const VertexSet& u,
                                       std::size_t theta);

/// Whether U is easy on t; returns the root of Free(U) when it is.
std::optional<TreeNode> easy_free_root(const LayeredGraph& g, const VertexSet& u, TreeNode t, int h0);

TargetTriple assemble_bottom_up(const LayeredGraph& g, const VertexSet& u, TreeNode t, int h0, std::size_t theta);

// ---------------------------------------------------------------------------
// The pipeline

struct AnalysisParams {
  std::optional<int> h0;
  std::optional<int> h1;
  std::optional<double> alpha;
  std::size_t theta = 0;
};

struct Schedule {
  int h0 = 0;
  int h1 = 0;
};

/// h0 = ⌈αh⌉ + 2, h1 = h0 + 2⌈log₃ k⌉ + ⌈log₂ h⌉, provided
/// h ≥ 2(⌈log₂ h⌉ + 2⌈log₃ k⌉ + 2)/(1-α) and h1 ≤ h; otherwise
/// CapacityError naming the least admissible h.
Schedule alpha_schedule(int h, int k, double alpha);
/// Least h meeting the implicit bound above.
int min_height_for_alpha(int k, double alpha);

struct AnalysisResult {
  std::string branch;  // "td", "td-closure" or "bu"
  int h0 = 0;
  int h1 = 0;
  std::optional<int> h2;
  std::size_t prefix_len = 0;
  TargetTriple triple;
  TripleReport report;
  std::size_t rank = 0;
  std::size_t family_size = 0;
  std::size_t dropped = 0;
  std::optional<TreeNode> bu_node;
  /// Position in the anchor preference list that produced the triple.
  std::size_t anchor_pick = 0;
  /// c(h1,h)·√k and (h-h1)·√k/260, the two size bounds quoted for the
  /// top-down branch.
  double bound_c = 0.0;
  double bound_260 = 0.0;
};

AnalysisResult analyze(const LayeredGraph& g, const Permutation& pi, const AnalysisParams& params);

}  // namespace dnnflab
