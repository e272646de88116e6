#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>

#include "dnnflab/graph.hpp"

namespace dnnflab {

/// (W, U0, U1) with the component-size threshold θ used by condition 1.
struct TargetTriple {
  VertexSet w;
  VertexSet u0;
  VertexSet u1;
  std::size_t theta = 0;

  std::size_t rank() const { return u0.size(); }
};

/// One entry per condition of the definition, in order:
///  1. every component of G[U1] has more than θ vertices;
///  2. every vertex of U0 is adjacent to U1 and to W;
///  3. U1 is not adjacent to W;
///  4. U0 is independent;
///  5. N(U0) ∩ W is independent;
///  6. every vertex of W has at most one neighbour in U0.
struct TripleReport {
  bool disjoint = true;
  std::array<bool, 6> holds{true, true, true, true, true, true};
  /// First offending vertex for each failed condition.
  std::array<std::optional<Vertex>, 6> witness{};

  bool ok() const {
    for (bool b : holds)
      if (!b) return false;
    return disjoint;
  }
  std::string summary(const Graph& g) const;
};

TripleReport validate_triple(const Graph& g, const TargetTriple& t);

struct PosNeg {
  VertexSet pos;
  VertexSet neg;
};

/// Pos = vertices of U0 whose neighbours inside the path variables are all
/// assigned 1 by a(P); Neg = U0 ∖ Pos.
PosNeg pos_neg_split(const Graph& g, const VertexSet& path_vars, const Assignment& a, const VertexSet& u0);

/// I = ⋃_{u∈U0} I_u where I_u = N(u) ∩ W for u ∈ Pos and I_u = {u} for u ∈ Neg.
/// Requires a valid triple and Var(a) = path_vars = W.
VertexSet bottleneck_set(const Graph& g, const VertexSet& path_vars, const Assignment& a, const TargetTriple& t);

}  // namespace dnnflab
