#include "dnnflab/dnnf.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "dnnflab/error.hpp"
#include "support_pool.hpp"

namespace dnnflab {

DecisionDnnf::DecisionDnnf(std::uint32_t num_vars, std::vector<Node> nodes, std::optional<NodeId> source)
    : num_vars_(num_vars), nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw StructuralError("circuit has no nodes", 0);
  source_ = source.value_or(static_cast<NodeId>(nodes_.size() - 1));
  if (source_ >= nodes_.size()) throw StructuralError("source index out of range", source_);
  const auto n = static_cast<NodeId>(nodes_.size());
  for (NodeId u = 0; u < n; ++u) {
    const Node& x = nodes_[u];
    if (x.is_sink()) continue;
    if (x.lo >= n || x.hi >= n) throw StructuralError("child index out of range", u);
    if (x.kind == NodeKind::kDecision && x.var >= num_vars_) throw StructuralError("variable out of range", u);
  }

  // Iterative DFS over every node; grey nodes on the stack detect cycles.
  std::vector<std::uint8_t> colour(n, 0);
  topo_.reserve(n);
  for (NodeId root = 0; root < n; ++root) {
    if (colour[root]) continue;
    std::vector<std::pair<NodeId, int>> stack{{root, 0}};
    colour[root] = 1;
    while (!stack.empty()) {
      auto& [u, next] = stack.back();
      const Node& x = nodes_[u];
      if (x.is_sink() || next == 2) {
        colour[u] = 2;
        topo_.push_back(u);
        stack.pop_back();
        continue;
      }
      NodeId c = next == 0 ? x.lo : x.hi;
      ++next;
      if (colour[c] == 1) throw StructuralError("cycle through child " + std::to_string(c), u);
      if (colour[c] == 0) {
        colour[c] = 1;
        stack.emplace_back(c, 0);
      }
    }
  }

  detail::SupportPool pool;
  support_id_.assign(n, 0);
  for (NodeId u : topo_) {
    const Node& x = nodes_[u];
    if (x.is_sink()) continue;
    std::optional<Var> own;
    if (x.kind == NodeKind::kDecision) own = x.var;
    support_id_[u] = pool.unite(support_id_[x.lo], support_id_[x.hi], own);
  }
  supports_ = pool.take_sets();
}

SizeClass SizeClass::from_alpha(double alpha, std::size_t n) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ContractError("alpha must lie in (0,1)");
  double t = std::floor(std::pow(static_cast<double>(n), alpha) + 1e-9);
  return SizeClass{static_cast<std::size_t>(t)};
}

ValidationReport validate(const DecisionDnnf& b, const SizeClass& sc) {
  ValidationReport r;
  const auto n = static_cast<NodeId>(b.size());

  std::vector<char> reached(n, 0);
  reached[b.source()] = 1;
  const auto& topo = b.topo_order();
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    if (!reached[*it]) continue;
    const Node& x = b.node(*it);
    if (!x.is_sink()) reached[x.lo] = reached[x.hi] = 1;
  }
  for (NodeId u = 0; u < n; ++u)
    if (!reached[u]) r.unreachable.push_back(u);
  r.single_source = r.unreachable.empty();

  int trues = 0, falses = 0;
  for (const Node& x : b.nodes()) {
    trues += x.kind == NodeKind::kTrue;
    falses += x.kind == NodeKind::kFalse;
  }
  r.sink_labels = trues <= 1 && falses <= 1;

  for (NodeId u = 0; u < n; ++u) {
    const Node& x = b.node(u);
    if (x.kind == NodeKind::kDecision) {
      if (set_contains(b.support(x.lo), x.var) || set_contains(b.support(x.hi), x.var))
        r.read_once_offenders.push_back(u);
    } else if (x.kind == NodeKind::kConj) {
      if (!set_disjoint(b.support(x.lo), b.support(x.hi))) r.decomposability_offenders.push_back(u);
      if (sc.large(b, x.lo) && sc.large(b, x.hi)) r.balanced.push_back(u);
    }
  }
  r.read_once = r.read_once_offenders.empty();
  r.decomposable = r.decomposability_offenders.empty();
  r.imbalanced = r.balanced.empty();
  return r;
}

namespace {

AssignmentSet merge(const AssignmentSet& a, const AssignmentSet& b) {
  std::vector<AssignmentSet::Row> rows(a.rows().begin(), a.rows().end());
  rows.insert(rows.end(), b.rows().begin(), b.rows().end());
  return AssignmentSet(a.universe(), std::move(rows));
}

AssignmentSet literal_set(Var x, bool bit) { return AssignmentSet({x}, {AssignmentSet::Row{bit}}); }

BigInt pow2(std::size_t e) {
  BigInt r = 1;
  r <<= e;
  return r;
}

std::size_t count_unbound(const VarSet& s, const Assignment& a) {
  std::size_t c = 0;
  for (Var v : s) c += !a.binds(v);
  return c;
}

}  // namespace

AssignmentSet semantics_at(const DecisionDnnf& b, NodeId u) {
  if (b.support(u).size() > kMaxSemanticsVars)
    throw CapacityError("semantics needs " + std::to_string(b.support(u).size()) + " variables; cap is " +
                        std::to_string(kMaxSemanticsVars));
  std::vector<std::optional<AssignmentSet>> memo(b.size());
  auto eval = [&](auto& self, NodeId w) -> const AssignmentSet& {
    if (memo[w]) return *memo[w];
    const Node& x = b.node(w);
    switch (x.kind) {
      case NodeKind::kTrue: memo[w] = AssignmentSet::unit(); break;
      case NodeKind::kFalse: memo[w] = AssignmentSet::none(); break;
      case NodeKind::kConj: memo[w] = product(self(self, x.lo), self(self, x.hi)); break;
      case NodeKind::kDecision: {
        const VarSet& s0 = b.support(x.lo);
        const VarSet& s1 = b.support(x.hi);
        AssignmentSet zero = product(literal_set(x.var, false),
                                     product(self(self, x.lo), AssignmentSet::cube(set_difference(s1, s0))));
        AssignmentSet one = product(literal_set(x.var, true),
                                    product(self(self, x.hi), AssignmentSet::cube(set_difference(s0, s1))));
        memo[w] = merge(zero, one);
        break;
      }
    }
    return *memo[w];
  };
  return eval(eval, u);
}

AssignmentSet semantics(const DecisionDnnf& b) { return semantics_at(b, b.source()); }

BigInt model_count(const DecisionDnnf& b) { return model_count(b, Assignment{}); }

BigInt model_count(const DecisionDnnf& b, const Assignment& a) {
  std::vector<BigInt> count(b.size());
  for (NodeId u : b.topo_order()) {
    const Node& x = b.node(u);
    switch (x.kind) {
      case NodeKind::kTrue: count[u] = 1; break;
      case NodeKind::kFalse: count[u] = 0; break;
      case NodeKind::kConj: count[u] = count[x.lo] * count[x.hi]; break;
      case NodeKind::kDecision: {
        const VarSet& s0 = b.support(x.lo);
        const VarSet& s1 = b.support(x.hi);
        auto bit = a.value(x.var);
        const bool same = &s0 == &s1;  // interned: equal supports share storage
        BigInt c = 0;
        if (bit != true) c += same ? count[x.lo] : count[x.lo] * pow2(count_unbound(set_difference(s1, s0), a));
        if (bit != false) c += same ? count[x.hi] : count[x.hi] * pow2(count_unbound(set_difference(s0, s1), a));
        count[u] = std::move(c);
        break;
      }
    }
  }
  return count[b.source()];
}

PathProfile path_profile(const DecisionDnnf& b, const TargetPath& p) {
  PathProfile out;
  NodeId cur = b.source();
  out.nodes.push_back(cur);
  std::vector<Binding> bits;
  for (std::size_t i = 0; i < p.branches.size(); ++i) {
    const Node& x = b.node(cur);
    const auto br = p.branches[i];
    if (x.is_sink()) throw ContractError("target path leaves a sink at step " + std::to_string(i));
    if (br > 1) throw ContractError("branch label must be 0 or 1");
    NodeId next = br ? x.hi : x.lo;
    if (x.kind == NodeKind::kDecision) {
      out.order.push_back(x.var);
      bits.emplace_back(x.var, br == 1);
    } else {
      out.junctions.push_back(cur);
      out.alternatives.push_back(br ? x.lo : x.hi);
    }
    cur = next;
    out.nodes.push_back(cur);
  }
  out.end = cur;
  out.vars = make_var_set(out.order);
  out.a = Assignment::from_bindings(std::move(bits));
  VarSet covered = set_union(out.vars, b.support(cur));
  for (NodeId v : out.alternatives) covered = set_union(covered, b.support(v));
  out.v0 = set_difference(b.vars(), covered);
  return out;
}

AssignmentSet restriction_decomposition(const DecisionDnnf& b, const TargetPath& p) {
  PathProfile prof = path_profile(b, p);
  if (model_count(b, prof.a) == 0) throw ContractError("a(P) does not extend to a model");
  AssignmentSet out = product(semantics_at(b, prof.end), AssignmentSet::cube(prof.v0));
  for (NodeId v : prof.alternatives) out = product(out, semantics_at(b, v));
  return out;
}

TargetPath mainstream_path(const DecisionDnnf& b, const Assignment& g, const SizeClass& sc) {
  TargetPath p;
  NodeId cur = b.source();
  while (sc.large(b, cur)) {
    const Node& x = b.node(cur);
    std::uint8_t br = 0;
    if (x.kind == NodeKind::kDecision) {
      auto v = g.value(x.var);
      if (!v) throw ContractError("assignment does not bind variable " + std::to_string(x.var + 1));
      br = *v ? 1 : 0;
    } else if (!sc.large(b, x.lo) && sc.large(b, x.hi)) {
      br = 1;
    }
    p.branches.push_back(br);
    cur = br ? x.hi : x.lo;
  }
  return p;
}

bool is_mainstream(const DecisionDnnf& b, const TargetPath& p, const SizeClass& sc) {
  for (NodeId v : path_profile(b, p).alternatives)
    if (sc.large(b, v)) return false;
  return true;
}

std::vector<char> carried_nodes(const DecisionDnnf& b, const Assignment& g) {
  std::vector<char> reached(b.size(), 0);
  reached[b.source()] = 1;
  const auto& topo = b.topo_order();
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    if (!reached[*it]) continue;
    const Node& x = b.node(*it);
    if (x.kind == NodeKind::kConj) {
      reached[x.lo] = reached[x.hi] = 1;
    } else if (x.kind == NodeKind::kDecision) {
      auto v = g.value(x.var);
      if (!v) throw ContractError("assignment does not bind variable " + std::to_string(x.var + 1));
      reached[*v ? x.hi : x.lo] = 1;
    }
  }
  return reached;
}

bool carried_through(const DecisionDnnf& b, const Assignment& g, NodeId u) {
  if (u >= b.size()) throw ContractError("node index out of range");
  return carried_nodes(b, g)[u] != 0;
}

namespace {

std::vector<std::string> split_strict(const std::string& line, std::size_t lineno) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t sp = line.find(' ', start);
    std::string tok = line.substr(start, sp == std::string::npos ? std::string::npos : sp - start);
    if (tok.empty()) throw ParseError("empty token (stray space)", lineno);
    out.push_back(std::move(tok));
    if (sp == std::string::npos) break;
    start = sp + 1;
  }
  return out;
}

std::uint64_t parse_uint(const std::string& tok, std::size_t lineno) {
  if (tok.empty() || tok.size() > 18) throw ParseError("bad number '" + tok + "'", lineno);
  std::uint64_t v = 0;
  for (char c : tok) {
    if (c < '0' || c > '9') throw ParseError("bad number '" + tok + "'", lineno);
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

}  // namespace

DecisionDnnf read_ddnnf(std::istream& in) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw ParseError("missing header", lineno);
  auto head = split_strict(line, lineno);
  if (head.size() != 3 || head[0] != "ddnnf") throw ParseError("header must be 'ddnnf <nodes> <vars>'", lineno);
  const auto count = parse_uint(head[1], lineno);
  const auto nv = parse_uint(head[2], lineno);
  if (count == 0) throw ParseError("circuit must have at least one node", lineno);
  if (nv > UINT32_MAX) throw ParseError("too many variables", lineno);
  std::vector<Node> nodes;
  nodes.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    ++lineno;
    if (!std::getline(in, line)) throw ParseError("expected " + std::to_string(count) + " node lines", lineno);
    auto tok = split_strict(line, lineno);
    auto child = [&](const std::string& t) {
      auto c = parse_uint(t, lineno);
      if (c >= i) throw ParseError("child " + t + " does not precede its parent", lineno);
      return static_cast<NodeId>(c);
    };
    if (tok[0] == "T" && tok.size() == 1) {
      nodes.push_back(Node::make_true());
    } else if (tok[0] == "F" && tok.size() == 1) {
      nodes.push_back(Node::make_false());
    } else if (tok[0] == "D" && tok.size() == 4) {
      auto x = parse_uint(tok[1], lineno);
      if (x < 1 || x > nv) throw ParseError("variable " + tok[1] + " out of range", lineno);
      nodes.push_back(Node::decision(static_cast<Var>(x - 1), child(tok[2]), child(tok[3])));
    } else if (tok[0] == "A" && tok.size() == 3) {
      nodes.push_back(Node::conj(child(tok[1]), child(tok[2])));
    } else {
      throw ParseError("unrecognized node line '" + line + "'", lineno);
    }
  }
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty()) throw ParseError("trailing content after the source line", lineno);
  }
  return DecisionDnnf(static_cast<std::uint32_t>(nv), std::move(nodes));
}

void write_ddnnf(std::ostream& out, const DecisionDnnf& b) {
  // Post-order from the source: children first, source last, unreachable nodes dropped.
  std::vector<std::int64_t> id(b.size(), -1);
  std::vector<NodeId> order;
  std::vector<std::pair<NodeId, int>> stack{{b.source(), 0}};
  std::vector<char> open(b.size(), 0);
  open[b.source()] = 1;
  while (!stack.empty()) {
    auto& [u, next] = stack.back();
    const Node& x = b.node(u);
    if (x.is_sink() || next == 2) {
      id[u] = static_cast<std::int64_t>(order.size());
      order.push_back(u);
      stack.pop_back();
      continue;
    }
    NodeId c = next == 0 ? x.lo : x.hi;
    ++next;
    if (!open[c]) {
      open[c] = 1;
      stack.emplace_back(c, 0);
    }
  }
  out << "ddnnf " << order.size() << ' ' << b.num_vars() << '\n';
  for (NodeId u : order) {
    const Node& x = b.node(u);
    switch (x.kind) {
      case NodeKind::kTrue: out << "T\n"; break;
      case NodeKind::kFalse: out << "F\n"; break;
      case NodeKind::kDecision: out << "D " << (x.var + 1) << ' ' << id[x.lo] << ' ' << id[x.hi] << '\n'; break;
      case NodeKind::kConj: out << "A " << id[x.lo] << ' ' << id[x.hi] << '\n'; break;
    }
  }
}

}  // namespace dnnflab
