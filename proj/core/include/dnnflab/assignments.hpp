#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dnnflab {

using Var = std::uint32_t;

// Sorted, duplicate-free list of variables.
using VarSet = std::vector<Var>;

VarSet make_var_set(std::vector<Var> vars);
VarSet set_union(const VarSet& a, const VarSet& b);
VarSet set_intersection(const VarSet& a, const VarSet& b);
VarSet set_difference(const VarSet& a, const VarSet& b);
bool set_contains(const VarSet& s, Var v);
bool set_disjoint(const VarSet& a, const VarSet& b);
bool set_includes(const VarSet& super, const VarSet& sub);

using Binding = std::pair<Var, bool>;

/// A partial assignment: a finite map from variables to bits, kept sorted by
/// variable so that equality and ordering are structural.
class Assignment {
 public:
  Assignment() = default;
  Assignment(std::initializer_list<Binding> bindings);

  /// Throws ContractError if a variable is bound twice.
  static Assignment from_bindings(std::vector<Binding> bindings);

  std::span<const Binding> bindings() const noexcept { return bindings_; }
  VarSet vars() const;
  std::size_t size() const noexcept { return bindings_.size(); }
  bool empty() const noexcept { return bindings_.empty(); }

  std::optional<bool> value(Var v) const;
  bool binds(Var v) const { return value(v).has_value(); }

  /// Agreement on the shared variables.
  bool consistent_with(const Assignment& other) const;
  bool subset_of(const Assignment& other) const;
  /// a ∪ b; the operands must be consistent.
  Assignment unite(const Assignment& other) const;
  /// a ∖ b: drops the bindings of a that b shares.
  Assignment minus(const Assignment& other) const;

  std::string to_string() const;

  friend bool operator==(const Assignment&, const Assignment&) = default;
  friend auto operator<=>(const Assignment&, const Assignment&) = default;

 private:
  std::vector<Binding> bindings_;
};

Assignment project(const Assignment& a, const VarSet& vars);

/// A finite set of assignments, all total over the same universe.
///
/// Members are stored as bit rows aligned with the sorted universe and kept
/// sorted and deduplicated, so two sets are equal iff their representations
/// are. The empty member set over the empty universe is distinct from {∅}.
class AssignmentSet {
 public:
  using Row = std::vector<bool>;

  AssignmentSet() = default;
  AssignmentSet(VarSet universe, std::vector<Row> rows);

  static AssignmentSet from_members(VarSet universe,
                                    const std::vector<Assignment>& members);
  /// {∅}: one member, empty universe.
  static AssignmentSet unit();
  /// No members.
  static AssignmentSet none(VarSet universe = {});
  /// {0,1}^vars.
  static AssignmentSet cube(VarSet vars);

  const VarSet& universe() const noexcept { return universe_; }
  std::span<const Row> rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }

  std::vector<Assignment> members() const;
  Assignment member(std::size_t i) const;
  bool contains(const Assignment& a) const;

  friend bool operator==(const AssignmentSet&, const AssignmentSet&) = default;

 private:
  VarSet universe_;
  std::vector<Row> rows_;
};

/// Projection of every member; the universe becomes Var(H) ∩ vars.
AssignmentSet project_set(const AssignmentSet& h, const VarSet& vars);

/// H|_a = { b ∖ a : b ∈ H, Proj(a, Var(H)) ⊆ b }.
AssignmentSet restrict(const AssignmentSet& h, const Assignment& a);

/// Disjoint product; throws VariableCollision on overlapping universes.
AssignmentSet product(const AssignmentSet& h1, const AssignmentSet& h2);

/// True iff H = Proj(H,S) × Proj(H, Var(H)∖S). S must be inside Var(H).
bool is_product_split(const AssignmentSet& h, const VarSet& s);

inline constexpr std::size_t kMaxPartitionVars = 20;

/// The unique finest partition of Var(H) into blocks whose projections
/// multiply back to H. Blocks are ordered by their smallest variable.
/// Throws ContractError on an empty set and CapacityError above
/// kMaxPartitionVars variables.
std::vector<VarSet> finest_partition(const AssignmentSet& h);

/// Whether some rectangle H = H1 × H2 separates two variables of Y.
bool breaks(const AssignmentSet& h, const VarSet& y);

}  // namespace dnnflab
