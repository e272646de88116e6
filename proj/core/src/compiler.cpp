#include "dnnflab/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include <boost/container_hash/hash.hpp>

#include "dnnflab/error.hpp"
#include "support_pool.hpp"

namespace dnnflab {

namespace {

// Literal code 2v for v, 2v+1 for ¬v.
using Lit = std::uint32_t;
using RClause = std::vector<Lit>;
using ClauseSet = std::vector<RClause>;

Var lit_var(Lit l) { return l >> 1; }
bool lit_positive(Lit l) { return (l & 1u) == 0; }

void canonicalize(ClauseSet& cs) {
  std::sort(cs.begin(), cs.end());
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
}

VarSet clause_vars(const ClauseSet& cs) {
  std::vector<Var> vs;
  for (const auto& c : cs)
    for (Lit l : c) vs.push_back(lit_var(l));
  return make_var_set(std::move(vs));
}

// cs with x := value. Satisfied clauses disappear, the falsified literal is
// dropped from the rest.
ClauseSet assign(const ClauseSet& cs, Var x, bool value) {
  const Lit sat = 2 * x + (value ? 0u : 1u);
  const Lit unsat = sat ^ 1u;
  ClauseSet out;
  out.reserve(cs.size());
  for (const auto& c : cs) {
    if (std::binary_search(c.begin(), c.end(), sat)) continue;
    auto it = std::lower_bound(c.begin(), c.end(), unsat);
    if (it != c.end() && *it == unsat) {
      RClause d;
      d.reserve(c.size() - 1);
      for (Lit l : c)
        if (l != unsat) d.push_back(l);
      out.push_back(std::move(d));
    } else {
      out.push_back(c);
    }
  }
  canonicalize(out);
  return out;
}

bool has_empty_clause(const ClauseSet& cs) {
  return std::any_of(cs.begin(), cs.end(), [](const RClause& c) { return c.empty(); });
}

struct Key {
  std::vector<std::uint32_t> flat;
  bool operator==(const Key&) const = default;
};
struct KeyHash {
  std::size_t operator()(const Key& k) const { return boost::hash_range(k.flat.begin(), k.flat.end()); }
};

struct NodeHash {
  std::size_t operator()(const Node& n) const {
    std::size_t h = 0;
    boost::hash_combine(h, static_cast<int>(n.kind));
    boost::hash_combine(h, n.var);
    boost::hash_combine(h, n.lo);
    boost::hash_combine(h, n.hi);
    return h;
  }
};

class Compiler {
 public:
  Compiler(const CompileOptions& opt, CompileStats* stats) : opt_(opt), stats_(stats) {
    false_ = make(Node::make_false());
    true_ = make(Node::make_true());
  }

  NodeId run(ClauseSet cs, std::uint32_t num_vars) {
    canonicalize(cs);
    if (has_empty_clause(cs)) return false_;
    VarSet all(num_vars);
    std::iota(all.begin(), all.end(), Var{0});
    return pad(solve(cs, true_), all);
  }

  NodeId false_node() const { return false_; }
  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  NodeId make(const Node& n) {
    auto it = unique_.find(n);
    if (it != unique_.end()) return it->second;
    if (nodes_.size() >= opt_.node_limit)
      throw CapacityError("compilation exceeded the node limit of " + std::to_string(opt_.node_limit));
    NodeId id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back(n);
    SupportPool::Id sid = 0;
    if (n.kind == NodeKind::kDecision) {
      sid = pool_.unite(support_[n.lo], support_[n.hi], n.var);
      if (stats_) ++stats_->decisions;
    } else if (n.kind == NodeKind::kConj) {
      sid = pool_.unite(support_[n.lo], support_[n.hi]);
      if (stats_) ++stats_->conjunctions;
    }
    support_.push_back(sid);
    unique_.emplace(n, id);
    return id;
  }

  const VarSet& support(NodeId u) const { return pool_.get(support_[u]); }

  // Wraps r in don't-care decisions so that its support covers `vars`.
  NodeId pad(NodeId r, const VarSet& vars) {
    if (r == false_) return r;
    for (Var v : set_difference(vars, support(r))) r = make(Node::decision(v, r, r));
    return r;
  }

  // Circuit for cs ∧ f(cont). Variables of cs that the result does not
  // mention are unconstrained.
  NodeId solve(const ClauseSet& cs, NodeId cont) {
    if (cs.empty()) return cont;
    if (has_empty_clause(cs)) return false_;
    Key key;
    if (opt_.cache) {
      key.flat.reserve(cs.size() * 3 + 1);
      key.flat.push_back(cont);
      for (const auto& c : cs) {
        key.flat.push_back(static_cast<std::uint32_t>(c.size()));
        key.flat.insert(key.flat.end(), c.begin(), c.end());
      }
      auto it = cache_.find(key);
      if (it != cache_.end()) {
        if (stats_) ++stats_->cache_hits;
        return it->second;
      }
    }

    ClauseSet cur = cs;
    std::vector<std::pair<Var, bool>> units;
    bool conflict = false;
    while (!conflict) {
      auto unit = std::find_if(cur.begin(), cur.end(), [](const RClause& c) { return c.size() == 1; });
      if (unit == cur.end()) break;
      const Lit l = unit->front();
      units.emplace_back(lit_var(l), lit_positive(l));
      cur = assign(cur, lit_var(l), lit_positive(l));
      conflict = has_empty_clause(cur);
    }

    NodeId r = false_;
    if (!conflict) {
      r = split(cur, cont);
      for (auto it = units.rbegin(); it != units.rend() && r != false_; ++it)
        r = it->second ? make(Node::decision(it->first, false_, r)) : make(Node::decision(it->first, r, false_));
    }
    if (opt_.cache) {
      cache_.emplace(std::move(key), r);
      if (stats_) stats_->cache_entries = cache_.size();
    }
    return r;
  }

  struct Component {
    ClauseSet clauses;
    VarSet vars;
  };

  std::vector<Component> components(const ClauseSet& cs) const {
    VarSet vars = clause_vars(cs);
    std::vector<std::size_t> parent(vars.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    auto pos = [&](Var v) { return static_cast<std::size_t>(std::lower_bound(vars.begin(), vars.end(), v) - vars.begin()); };
    for (const auto& c : cs)
      for (std::size_t i = 1; i < c.size(); ++i) {
        auto a = find(pos(lit_var(c[0]))), b = find(pos(lit_var(c[i])));
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    // Roots are the smallest member, so ordering by root orders components
    // by their smallest variable.
    std::vector<std::size_t> slot(vars.size(), SIZE_MAX);
    std::vector<Component> out;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      std::size_t r = find(i);
      if (slot[r] == SIZE_MAX) {
        slot[r] = out.size();
        out.emplace_back();
      }
      out[slot[r]].vars.push_back(vars[i]);
    }
    for (const auto& c : cs) out[slot[find(pos(lit_var(c[0])))]].clauses.push_back(c);
    return out;
  }

  NodeId split(const ClauseSet& cs, NodeId cont) {
    if (cs.empty()) return cont;
    auto comps = components(cs);
    if (comps.size() == 1) return branch(cs, comps.front().vars, cont);

    if (!opt_.theta) {
      std::vector<NodeId> parts;
      for (const auto& c : comps) {
        NodeId r = pad(solve(c.clauses, true_), c.vars);
        if (r == false_) return false_;
        parts.push_back(r);
      }
      NodeId acc = parts.back();
      for (std::size_t i = parts.size() - 1; i-- > 0;) {
        NodeId a = parts[i];
        acc = support(a).size() <= support(acc).size() ? make(Node::conj(a, acc)) : make(Node::conj(acc, a));
      }
      if (cont != true_) acc = make(Node::conj(acc, cont));
      return acc;
    }

    // Threshold mode: large components are chained through continuations,
    // small ones hang off conjunctions as the left child.
    const std::size_t theta = *opt_.theta;
    NodeId tail = cont;
    for (std::size_t i = comps.size(); i-- > 0;) {
      if (comps[i].vars.size() <= theta) continue;
      tail = pad(solve(comps[i].clauses, tail), comps[i].vars);
      if (tail == false_) return false_;
    }
    for (std::size_t i = comps.size(); i-- > 0;) {
      if (comps[i].vars.size() > theta) continue;
      NodeId s = pad(solve(comps[i].clauses, true_), comps[i].vars);
      if (s == false_) return false_;
      tail = tail == true_ ? s : make(Node::conj(s, tail));
    }
    return tail;
  }

  Var choose(const ClauseSet& cs, const VarSet& candidates) const {
    if (opt_.heuristic == Heuristic::kLexical) return candidates.front();
    std::unordered_map<Var, std::size_t> occ;
    for (const auto& c : cs)
      for (Lit l : c) ++occ[lit_var(l)];
    Var best = candidates.front();
    std::size_t best_n = 0;
    for (Var v : candidates) {
      auto n = occ[v];
      if (n > best_n) best = v, best_n = n;
    }
    return best;
  }

  NodeId branch(const ClauseSet& cs, const VarSet& candidates, NodeId cont) {
    const Var x = choose(cs, candidates);
    NodeId lo = solve(assign(cs, x, false), cont);
    NodeId hi = solve(assign(cs, x, true), cont);
    if (lo == hi) return lo;
    return make(Node::decision(x, lo, hi));
  }

  using SupportPool = detail::SupportPool;

  const CompileOptions& opt_;
  CompileStats* stats_;
  std::vector<Node> nodes_;
  std::vector<SupportPool::Id> support_;
  SupportPool pool_;
  std::unordered_map<Node, NodeId, NodeHash> unique_;
  std::unordered_map<Key, NodeId, KeyHash> cache_;
  NodeId false_ = 0;
  NodeId true_ = 0;
};

// Keeps the nodes reachable from `root`, children first, root last.
DecisionDnnf compact(const std::vector<Node>& nodes, NodeId root, std::uint32_t num_vars) {
  std::vector<std::int64_t> id(nodes.size(), -1);
  std::vector<Node> out;
  std::vector<std::pair<NodeId, int>> stack{{root, 0}};
  std::vector<char> open(nodes.size(), 0);
  open[root] = 1;
  while (!stack.empty()) {
    auto& [u, next] = stack.back();
    const Node& x = nodes[u];
    if (x.is_sink() || next == 2) {
      Node y = x;
      if (!x.is_sink()) {
        y.lo = static_cast<NodeId>(id[x.lo]);
        y.hi = static_cast<NodeId>(id[x.hi]);
      }
      id[u] = static_cast<std::int64_t>(out.size());
      out.push_back(y);
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
  return DecisionDnnf(num_vars, std::move(out));
}

}  // namespace

DecisionDnnf compile(const Cnf& cnf, const CompileOptions& opt, CompileStats* stats) {
  ClauseSet cs;
  cs.reserve(cnf.clauses.size());
  for (const auto& c : cnf.clauses) {
    RClause r;
    for (const auto& l : c) {
      if (l.var >= cnf.num_vars) throw ContractError("literal variable out of range");
      r.push_back(2 * l.var + (l.positive ? 0u : 1u));
    }
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    bool tautology = false;
    for (std::size_t i = 1; i < r.size(); ++i)
      if ((r[i] ^ 1u) == r[i - 1]) tautology = true;
    if (!tautology) cs.push_back(std::move(r));
  }
  if (stats) *stats = CompileStats{};
  Compiler c(opt, stats);
  NodeId root = c.run(std::move(cs), cnf.num_vars);
  return compact(c.nodes(), root, cnf.num_vars);
}

ImbalanceProfile imbalance_profile(const DecisionDnnf& b, const SizeClass& sc) {
  ImbalanceProfile p;
  p.n = b.vars().size();
  for (NodeId u = 0; u < b.size(); ++u) {
    const Node& x = b.node(u);
    if (x.kind != NodeKind::kConj) continue;
    ImbalanceRow row{u, b.support(x.lo).size(), b.support(x.hi).size(), sc.large(b, x.lo) && sc.large(b, x.hi)};
    const std::size_t m = std::min(row.left, row.right);
    p.max_min_support = std::max(p.max_min_support, m);
    if (row.balanced) p.max_balanced_min = std::max(p.max_balanced_min, m);
    p.rows.push_back(row);
  }
  if (p.max_min_support > 1 && p.n > 1)
    p.alpha_threshold = std::log(static_cast<double>(p.max_min_support)) / std::log(static_cast<double>(p.n));
  return p;
}

std::uint64_t brute_force_count(const Cnf& cnf) {
  if (cnf.num_vars > 24) throw CapacityError("brute-force counting is capped at 24 variables");
  std::uint64_t count = 0;
  const std::uint64_t total = std::uint64_t{1} << cnf.num_vars;
  for (std::uint64_t m = 0; m < total; ++m) {
    bool ok = true;
    for (const auto& c : cnf.clauses) {
      bool sat = false;
      for (const auto& l : c)
        if (((m >> l.var) & 1u) == (l.positive ? 1u : 0u)) {
          sat = true;
          break;
        }
      if (!sat) {
        ok = false;
        break;
      }
    }
    count += ok;
  }
  return count;
}

}  // namespace dnnflab
