#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dnnflab/assignments.hpp"

namespace dnnflab {

// Vertices are dense indices. For φ(G) the variable of vertex v is v itself,
// so vertex sets and variable sets share one representation.
using Vertex = Var;
using VertexSet = VarSet;
using Edge = std::pair<Vertex, Vertex>;

/// Simple undirected graph with named vertices.
class Graph {
 public:
  Graph() = default;
  /// Throws ContractError on duplicate names, self-loops or dangling
  /// endpoints. Parallel edges are merged.
  Graph(std::vector<std::string> names, std::vector<Edge> edges);

  std::size_t num_vertices() const noexcept { return names_.size(); }
  std::size_t num_edges() const noexcept { return edges_.size(); }

  const std::string& name(Vertex v) const { return names_.at(v); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::optional<Vertex> find(const std::string& name) const;
  /// Like find(), but throws ContractError for unknown names.
  Vertex at(const std::string& name) const;

  /// Edges with first < second, sorted.
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::span<const Vertex> neighbors(Vertex v) const { return adj_.at(v); }
  std::size_t degree(Vertex v) const { return adj_.at(v).size(); }
  std::size_t max_degree() const;
  bool adjacent(Vertex u, Vertex v) const;
  VertexSet all_vertices() const;

 private:
  std::vector<std::string> names_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Vertex>> adj_;
  std::unordered_map<std::string, Vertex> index_;
};

/// N(S): vertices outside S adjacent to some vertex of S.
VertexSet open_neighborhood(const Graph& g, const VertexSet& s);
/// N(v) ∩ S.
VertexSet neighbors_in(const Graph& g, Vertex v, const VertexSet& s);
bool is_independent(const Graph& g, const VertexSet& s);
bool is_connected_set(const Graph& g, const VertexSet& s);
/// Connected components of G[S], each sorted, ordered by smallest vertex.
std::vector<VertexSet> components(const Graph& g, const VertexSet& s);
bool sets_adjacent(const Graph& g, const VertexSet& a, const VertexSet& b);

/// Cartesian product H1 □ H2. Vertex (u,v) gets index u·|V(H2)| + v and
/// name "<name(u)>:<name(v)>".
Graph cartesian_product(const Graph& h1, const Graph& h2);

/// Path on k vertices named "1".."k".
Graph path_graph(std::size_t k);

}  // namespace dnnflab
