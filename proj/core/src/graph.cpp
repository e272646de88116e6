#include "dnnflab/graph.hpp"

#include <algorithm>

#include "dnnflab/error.hpp"

namespace dnnflab {

Graph::Graph(std::vector<std::string> names, std::vector<Edge> edges)
    : names_(std::move(names)), adj_(names_.size()) {
  index_.reserve(names_.size());
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!index_.emplace(names_[i], static_cast<Vertex>(i)).second)
      throw ContractError("duplicate vertex name '" + names_[i] + "'");
  }
  for (auto [u, v] : edges) {
    if (u >= names_.size() || v >= names_.size()) throw ContractError("edge endpoint out of range");
    if (u == v) throw ContractError("self-loop at '" + names_[u] + "'");
    if (u > v) std::swap(u, v);
    edges_.emplace_back(u, v);
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  for (auto [u, v] : edges_) {
    adj_[u].push_back(v);
    adj_[v].push_back(u);
  }
  for (auto& a : adj_) std::sort(a.begin(), a.end());
}

std::optional<Vertex> Graph::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vertex Graph::at(const std::string& name) const {
  auto v = find(name);
  if (!v) throw ContractError("unknown vertex '" + name + "'");
  return *v;
}

std::size_t Graph::max_degree() const {
  std::size_t d = 0;
  for (const auto& a : adj_) d = std::max(d, a.size());
  return d;
}

bool Graph::adjacent(Vertex u, Vertex v) const {
  const auto& a = adj_.at(u);
  return std::binary_search(a.begin(), a.end(), v);
}

VertexSet Graph::all_vertices() const {
  VertexSet all(names_.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<Vertex>(i);
  return all;
}

VertexSet open_neighborhood(const Graph& g, const VertexSet& s) {
  std::vector<Vertex> out;
  for (Vertex v : s)
    for (Vertex w : g.neighbors(v))
      if (!set_contains(s, w)) out.push_back(w);
  return make_var_set(std::move(out));
}

VertexSet neighbors_in(const Graph& g, Vertex v, const VertexSet& s) {
  VertexSet out;
  for (Vertex w : g.neighbors(v))
    if (set_contains(s, w)) out.push_back(w);
  return out;
}

bool is_independent(const Graph& g, const VertexSet& s) {
  for (Vertex v : s)
    for (Vertex w : g.neighbors(v))
      if (w > v && set_contains(s, w)) return false;
  return true;
}

std::vector<VertexSet> components(const Graph& g, const VertexSet& s) {
  std::vector<VertexSet> out;
  std::vector<char> seen(g.num_vertices(), 0);
  std::vector<Vertex> stack;
  for (Vertex root : s) {
    if (seen[root]) continue;
    VertexSet comp;
    seen[root] = 1;
    stack.push_back(root);
    while (!stack.empty()) {
      Vertex v = stack.back();
      stack.pop_back();
      comp.push_back(v);
      for (Vertex w : g.neighbors(v)) {
        if (!seen[w] && set_contains(s, w)) {
          seen[w] = 1;
          stack.push_back(w);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

bool is_connected_set(const Graph& g, const VertexSet& s) { return components(g, s).size() <= 1; }

bool sets_adjacent(const Graph& g, const VertexSet& a, const VertexSet& b) {
  for (Vertex v : a)
    for (Vertex w : g.neighbors(v))
      if (set_contains(b, w)) return true;
  return false;
}

Graph cartesian_product(const Graph& h1, const Graph& h2) {
  const std::size_t n2 = h2.num_vertices();
  std::vector<std::string> names;
  names.reserve(h1.num_vertices() * n2);
  for (const auto& a : h1.names())
    for (const auto& b : h2.names()) names.push_back(a + ":" + b);
  auto id = [n2](Vertex u, Vertex v) { return static_cast<Vertex>(u * n2 + v); };
  std::vector<Edge> edges;
  for (Vertex u = 0; u < h1.num_vertices(); ++u)
    for (auto [v1, v2] : h2.edges()) edges.emplace_back(id(u, v1), id(u, v2));
  for (auto [u1, u2] : h1.edges())
    for (Vertex v = 0; v < n2; ++v) edges.emplace_back(id(u1, v), id(u2, v));
  return Graph(std::move(names), std::move(edges));
}

Graph path_graph(std::size_t k) {
  std::vector<std::string> names;
  std::vector<Edge> edges;
  for (std::size_t i = 1; i <= k; ++i) {
    names.push_back(std::to_string(i));
    if (i > 1) edges.emplace_back(static_cast<Vertex>(i - 2), static_cast<Vertex>(i - 1));
  }
  return Graph(std::move(names), std::move(edges));
}

}  // namespace dnnflab
