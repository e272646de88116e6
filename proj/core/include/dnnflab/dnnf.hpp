#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "dnnflab/assignments.hpp"

namespace dnnflab {

using BigInt = boost::multiprecision::cpp_int;
using NodeId = std::uint32_t;

enum class NodeKind : std::uint8_t { kTrue, kFalse, kDecision, kConj };

/// One node record. For decisions, `lo`/`hi` are the 0- and 1-children; for
/// conjunctions they are the left and right children.
struct Node {
  NodeKind kind = NodeKind::kTrue;
  Var var = 0;
  NodeId lo = 0;
  NodeId hi = 0;

  static Node make_true() { return {NodeKind::kTrue, 0, 0, 0}; }
  static Node make_false() { return {NodeKind::kFalse, 0, 0, 0}; }
  static Node decision(Var x, NodeId lo, NodeId hi) { return {NodeKind::kDecision, x, lo, hi}; }
  static Node conj(NodeId l, NodeId r) { return {NodeKind::kConj, 0, l, r}; }

  bool is_sink() const { return kind == NodeKind::kTrue || kind == NodeKind::kFalse; }
  friend bool operator==(const Node&, const Node&) = default;
};

/// A ∧d-FBDD: a DAG of True/False sinks, decision nodes and conjunction
/// nodes with a designated source. Construction checks that child indices and
/// variables are in range and that the graph is acyclic; the remaining syntax
/// rules (read-once, decomposable, ...) are reported by validate().
class DecisionDnnf {
 public:
  /// The source defaults to the last node. Throws StructuralError.
  DecisionDnnf(std::uint32_t num_vars, std::vector<Node> nodes, std::optional<NodeId> source = std::nullopt);

  std::uint32_t num_vars() const noexcept { return num_vars_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  NodeId source() const noexcept { return source_; }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const Node& node(NodeId u) const { return nodes_.at(u); }

  /// Var(B_u), cached.
  const VarSet& support(NodeId u) const { return supports_[support_id_.at(u)]; }
  /// Var(B).
  const VarSet& vars() const { return support(source_); }
  /// Nodes ordered children-first.
  const std::vector<NodeId>& topo_order() const noexcept { return topo_; }

 private:
  std::uint32_t num_vars_;
  std::vector<Node> nodes_;
  NodeId source_;
  // Supports are interned: many nodes share one variable set.
  std::vector<std::uint32_t> support_id_;
  std::vector<VarSet> supports_;
  std::vector<NodeId> topo_;
};

/// Small/large split: u is small iff |Var(B_u)| ≤ θ.
struct SizeClass {
  std::size_t theta = 0;

  /// θ = ⌊n^α⌋.
  static SizeClass from_alpha(double alpha, std::size_t n);

  bool small(const DecisionDnnf& b, NodeId u) const { return b.support(u).size() <= theta; }
  bool large(const DecisionDnnf& b, NodeId u) const { return !small(b, u); }
};

struct ValidationReport {
  bool acyclic = true;
  bool single_source = true;
  bool sink_labels = true;
  bool read_once = true;
  bool decomposable = true;
  bool imbalanced = true;
  std::vector<NodeId> unreachable;
  std::vector<NodeId> read_once_offenders;
  std::vector<NodeId> decomposability_offenders;
  /// Conjunction nodes whose children are both large.
  std::vector<NodeId> balanced;

  /// Structural validity (everything except the imbalance check).
  bool syntax_ok() const { return acyclic && single_source && sink_labels && read_once && decomposable; }
  bool ok() const { return syntax_ok() && imbalanced; }
};

ValidationReport validate(const DecisionDnnf& b, const SizeClass& sc);

inline constexpr std::size_t kMaxSemanticsVars = 20;

/// S(B) over Var(B). Throws CapacityError above kMaxSemanticsVars variables.
AssignmentSet semantics(const DecisionDnnf& b);
/// S(B_u) over Var(B_u).
AssignmentSet semantics_at(const DecisionDnnf& b, NodeId u);

/// |S(B)|.
BigInt model_count(const DecisionDnnf& b);
/// |{g ∈ S(B) : g agrees with a on Var(B)}|, one bottom-up pass.
BigInt model_count(const DecisionDnnf& b, const Assignment& a);

/// A source-rooted path, stored as the branch taken at each step (0 = the
/// 0-child or left child, 1 = the 1-child or right child).
struct TargetPath {
  std::vector<std::uint8_t> branches;

  friend bool operator==(const TargetPath&, const TargetPath&) = default;
};

struct PathProfile {
  std::vector<NodeId> nodes;  // source first, u(P) last
  VarSet vars;                // Var(P)
  std::vector<Var> order;     // π(P)
  Assignment a;               // a(P)
  std::vector<NodeId> junctions;
  std::vector<NodeId> alternatives;  // Alt(P), one per junction, path order
  VarSet v0;                          // V0(P)
  NodeId end = 0;                     // u(P)
};

/// Throws ContractError if a step leaves a sink.
PathProfile path_profile(const DecisionDnnf& b, const TargetPath& p);

/// S(B_u(P)) × Π_{v∈Alt(P)} S(B_v) × {0,1}^{V0(P)}. Throws ContractError if
/// a(P) has no extension to a model of B.
AssignmentSet restriction_decomposition(const DecisionDnnf& b, const TargetPath& p);

/// The "while curnode is large" walk: follow g at large decisions and the
/// large child (else the left one) at large conjunctions.
TargetPath mainstream_path(const DecisionDnnf& b, const Assignment& g, const SizeClass& sc);

/// Every alternative of P is small.
bool is_mainstream(const DecisionDnnf& b, const TargetPath& p, const SizeClass& sc);

/// Whether some target path ending at u has a(P) ⊆ g.
bool carried_through(const DecisionDnnf& b, const Assignment& g, NodeId u);
/// The same query for every node at once; entry u answers carried_through(b, g, u).
std::vector<char> carried_nodes(const DecisionDnnf& b, const Assignment& g);

/// ddnnf text format: "ddnnf <nodes> <vars>", then T | F | D x c0 c1 | A l r
/// children first, variables 1-based, last line is the source. Parsing is
/// strict about whitespace and throws ParseError.
DecisionDnnf read_ddnnf(std::istream& in);
void write_ddnnf(std::ostream& out, const DecisionDnnf& b);

}  // namespace dnnflab
