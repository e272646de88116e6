#include "dnnflab/probability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>
#include <unordered_map>

#include "dnnflab/error.hpp"
#include "dnnflab/triples.hpp"

namespace dnnflab {

Assignment assign_of(const Graph& g, const EdgeOrientation& e) {
  const auto& edges = g.edges();
  if (e.choice.size() != edges.size()) throw ContractError("orientation is not total");
  std::vector<Binding> b(g.num_vertices());
  for (Vertex v = 0; v < g.num_vertices(); ++v) b[v] = {v, false};
  for (std::size_t i = 0; i < edges.size(); ++i) {
    Vertex c = e.choice[i];
    if (c != edges[i].first && c != edges[i].second) throw ContractError("orientation picks a non-endpoint");
    b[c].second = true;
  }
  return Assignment::from_bindings(std::move(b));
}

EdgeOrientation random_orientation(const Graph& g, std::mt19937_64& rng) {
  EdgeOrientation e;
  e.choice.reserve(g.num_edges());
  std::uint64_t bits = 0;
  int left = 0;
  for (const auto& [u, v] : g.edges()) {
    if (left == 0) {
      bits = rng();
      left = 64;
    }
    e.choice.push_back((bits & 1U) ? v : u);
    bits >>= 1;
    --left;
  }
  return e;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t sample_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(master ^ (stream * 0xd1b54a32d192ed03ULL)) + index);
}

namespace {

void check_subset(const Graph& g, const VertexSet& s) {
  for (Vertex v : s)
    if (v >= g.num_vertices()) throw ContractError("set names an unknown vertex");
}

Rational pow2_inv(std::size_t d) {
  BigInt den = 1;
  den <<= static_cast<unsigned>(d);
  return Rational(BigInt(1), den);
}

}  // namespace

Rational pr_set(const Graph& g, const VertexSet& s) {
  check_subset(g, s);
  if (!is_independent(g, s)) return pr_set_enumerate(g, s);
  Rational p = 1;
  for (Vertex v : s) p *= Rational(1) - pow2_inv(g.degree(v));
  return p;
}

Rational pr_set_enumerate(const Graph& g, const VertexSet& s) {
  check_subset(g, s);
  std::vector<char> in_s(g.num_vertices(), 0);
  for (Vertex v : s) in_s[v] = 1;
  std::vector<Edge> inc;
  for (const auto& e : g.edges())
    if (in_s[e.first] || in_s[e.second]) inc.push_back(e);
  if (inc.size() > kMaxIncidentEdges)
    throw CapacityError(std::to_string(inc.size()) + " incident edges exceed the enumeration cap of " +
                        std::to_string(kMaxIncidentEdges));
  // Edges away from S cannot affect Set(S), so the incident ones suffice.
  const std::uint64_t total = std::uint64_t{1} << inc.size();
  std::uint64_t good = 0;
  std::vector<char> pos(g.num_vertices(), 0);
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    for (Vertex v : s) pos[v] = 0;
    for (std::size_t i = 0; i < inc.size(); ++i) {
      Vertex c = (mask >> i) & 1U ? inc[i].second : inc[i].first;
      pos[c] = 1;
    }
    bool all = std::all_of(s.begin(), s.end(), [&](Vertex v) { return pos[v] != 0; });
    if (all) ++good;
  }
  return Rational(BigInt(good), BigInt(total));
}

Rational beta_bound(std::size_t n) {
  Rational r = 1;
  for (std::size_t i = 0; i < n; ++i) r *= Rational(63, 64);
  return r;
}

Estimate wilson(std::size_t hits, std::size_t samples) {
  Estimate e;
  e.hits = hits;
  e.samples = samples;
  if (samples == 0) return e;
  const double z = 1.959963984540054;
  const double n = static_cast<double>(samples);
  const double p = static_cast<double>(hits) / n;
  const double den = 1.0 + z * z / n;
  const double mid = (p + z * z / (2 * n)) / den;
  const double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den;
  e.value = p;
  e.lo = std::max(0.0, mid - half);
  e.hi = std::min(1.0, mid + half);
  return e;
}

Estimate mc_carried(const DecisionDnnf& b, const Graph& g, NodeId u, std::size_t samples, std::uint64_t seed) {
  if (u >= b.size()) throw ContractError("node index out of range");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    std::mt19937_64 rng(sample_seed(seed, 1, i));
    Assignment a = assign_of(g, random_orientation(g, rng));
    if (carried_nodes(b, a)[u]) ++hits;
  }
  return wilson(hits, samples);
}

Schedule default_schedule(int h, int k) { return {std::max(0, h - ceil_log3(k) - 3), h}; }

namespace {

struct SampleOut {
  LedgerRow row;
  std::optional<VertexSet> bottleneck;
  bool self_positive = true;
};

template <class F>
void parallel_for(std::size_t n, unsigned jobs, F&& body) {
  jobs = std::max(1U, jobs);
  if (jobs == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(0U, i);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < jobs; ++j)
    pool.emplace_back([&, j] {
      for (std::size_t i = j; i < n; i += jobs) body(j, i);
    });
  for (auto& t : pool) t.join();
}

SampleOut run_sample(const DecisionDnnf& b, const LayeredGraph& lg, const SizeClass& sc,
                     const AnalysisParams& params, std::uint64_t seed, std::size_t idx) {
  const Graph& gr = lg.graph();
  std::mt19937_64 rng(sample_seed(seed, 0, idx));
  Assignment g = assign_of(gr, random_orientation(gr, rng));
  TargetPath p0 = mainstream_path(b, g, sc);

  // Walk P0 once for π(P0) and u(P0).
  std::vector<Vertex> order;
  NodeId end = b.source();
  for (std::uint8_t br : p0.branches) {
    const Node& x = b.node(end);
    if (x.kind == NodeKind::kDecision) order.push_back(x.var);
    end = br ? x.hi : x.lo;
  }

  SampleOut out;
  out.row.sample = idx;
  out.row.node = end;
  if (p0.branches.empty()) {
    out.row.status = "source-small";
    return out;
  }
  AnalysisResult res;
  try {
    res = analyze(lg, complete_lexicographically(lg, order), params);
  } catch (const CapacityError&) {
    out.row.status = "no-triple";
    return out;
  }
  out.row.prefix_len = res.prefix_len;
  out.row.rank = res.rank;
  if (res.prefix_len >= order.size() || !res.report.ok()) {
    out.row.status = "falsified";
    return out;
  }

  // P(g): the shortest prefix of P0 whose decision variables are the
  // analysed prefix.
  TargetPath pg;
  std::size_t seen = 0;
  NodeId cur = b.source();
  for (std::uint8_t br : p0.branches) {
    const Node& x = b.node(cur);
    pg.branches.push_back(br);
    cur = br ? x.hi : x.lo;
    if (x.kind == NodeKind::kDecision && ++seen == res.prefix_len) break;
  }
  PathProfile prof = path_profile(b, pg);
  out.row.node = prof.end;
  out.row.status = "ok";
  out.bottleneck = bottleneck_set(gr, prof.vars, prof.a, res.triple);
  for (Vertex v : *out.bottleneck)
    if (g.value(v) != true) out.self_positive = false;
  return out;
}

}  // namespace

LedgerReport distinct_nodes_ledger(const DecisionDnnf& b, const LayeredGraph& g, const SizeClass& sc,
                                   const LedgerOptions& opt) {
  const Graph& gr = g.graph();
  if (b.num_vars() != gr.num_vertices()) throw ContractError("circuit variables do not match the graph");

  AnalysisParams params = opt.params;
  params.theta = sc.theta;
  LedgerReport rep;
  if (!params.alpha && !params.h0 && !params.h1) {
    Schedule s = default_schedule(g.h(), g.k());
    params.h0 = s.h0;
    params.h1 = s.h1;
  }
  if (params.alpha) {
    Schedule s = alpha_schedule(g.h(), g.k(), *params.alpha);
    rep.h0 = s.h0;
    rep.h1 = s.h1;
  } else {
    rep.h0 = params.h0.value_or(0);
    rep.h1 = params.h1.value_or(0);
  }
  rep.theta = sc.theta;
  rep.samples = opt.samples;
  rep.carried_samples = opt.carried_samples ? opt.carried_samples : opt.samples;
  rep.seed = opt.seed;

  std::vector<SampleOut> outs(opt.samples);
  parallel_for(opt.samples, opt.jobs,
               [&](unsigned, std::size_t i) { outs[i] = run_sample(b, g, sc, params, opt.seed, i); });

  std::vector<NodeId> nodes;
  for (const auto& o : outs) nodes.push_back(o.row.node);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  std::unordered_map<NodeId, std::size_t> slot;
  for (std::size_t j = 0; j < nodes.size(); ++j) slot[nodes[j]] = j;

  rep.nodes.resize(nodes.size());
  std::vector<std::vector<VertexSet>> checks(nodes.size());
  for (auto& o : outs) {
    std::size_t j = slot[o.row.node];
    ++rep.nodes[j].observed;
    if (o.row.status == "falsified") ++rep.falsifications;
    if (o.row.status == "no-triple") ++rep.no_triple;
    if (o.bottleneck) {
      ++rep.elpos_checks;
      if (!o.self_positive) ++rep.elpos_violations;
      checks[j].push_back(std::move(*o.bottleneck));
    }
    rep.rows.push_back(o.row);
  }
  for (auto& c : checks) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }

  // Carried estimates from an independent stream of orientations.
  const unsigned jobs = std::max(1U, opt.jobs);
  std::vector<std::vector<std::size_t>> hits(jobs, std::vector<std::size_t>(nodes.size(), 0));
  std::vector<std::size_t> n_checks(jobs, 0), n_bad(jobs, 0);
  parallel_for(rep.carried_samples, jobs, [&](unsigned w, std::size_t i) {
    std::mt19937_64 rng(sample_seed(opt.seed, 1, i));
    Assignment h = assign_of(gr, random_orientation(gr, rng));
    auto reached = carried_nodes(b, h);
    const auto bind = h.bindings();  // total, indexed by vertex
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      if (!reached[nodes[j]]) continue;
      ++hits[w][j];
      for (const auto& iset : checks[j]) {
        ++n_checks[w];
        if (!std::all_of(iset.begin(), iset.end(), [&](Vertex v) { return bind[v].second; })) ++n_bad[w];
      }
    }
  });
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    std::size_t total = 0;
    for (unsigned w = 0; w < jobs; ++w) total += hits[w][j];
    rep.nodes[j].node = nodes[j];
    rep.nodes[j].carried = wilson(total, rep.carried_samples);
    rep.union_sum += rep.nodes[j].carried.value;
  }
  for (unsigned w = 0; w < jobs; ++w) {
    rep.elpos_checks += n_checks[w];
    rep.elpos_violations += n_bad[w];
  }
  return rep;
}

void write_ledger_csv(std::ostream& out, const LedgerReport& r) {
  std::unordered_map<NodeId, const NodeEstimate*> est;
  for (const auto& n : r.nodes) est[n.node] = &n;
  out << "sampleIdx,nodeId,prefixLen,triplerank,carriedEstimate,ciLow,ciHigh\n";
  char buf[96];
  for (const auto& row : r.rows) {
    const Estimate& e = est.at(row.node)->carried;
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f", e.value, e.lo, e.hi);
    out << row.sample << ',' << row.node << ',' << row.prefix_len << ',' << row.rank << ',' << buf << '\n';
  }
}

}  // namespace dnnflab
