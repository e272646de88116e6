#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "dnnflab/dnnf.hpp"
#include "dnnflab/graph.hpp"
#include "dnnflab/instances.hpp"
#include "dnnflab/permwidth.hpp"

namespace dnnflab {

using Rational = boost::multiprecision::cpp_rational;

/// For every edge (in Graph::edges() order) the endpoint that receives the
/// edge's coin.
struct EdgeOrientation {
  std::vector<Vertex> choice;
};

/// The model whose positive set is Out(e). Throws ContractError unless e is
/// total and every choice is an endpoint of its edge.
Assignment assign_of(const Graph& g, const EdgeOrientation& e);

EdgeOrientation random_orientation(const Graph& g, std::mt19937_64& rng);

/// SplitMix64 step, used to derive independent per-sample seeds.
std::uint64_t splitmix64(std::uint64_t x);
/// Seed of sample `index` in stream `stream` under `master`.
std::uint64_t sample_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index);

/// Most edges incident to S that the enumerator will walk (2^12 orientations).
inline constexpr std::size_t kMaxIncidentEdges = 12;

/// Pr(Set(S)). Independent S uses Π(1 - 2^-deg v); otherwise the orientations
/// of the edges incident to S are enumerated (CapacityError past the cap).
Rational pr_set(const Graph& g, const VertexSet& s);
/// Always enumerates the incident-edge orientations; the reference oracle.
Rational pr_set_enumerate(const Graph& g, const VertexSet& s);
/// (1/β)^n with β = 64/63.
Rational beta_bound(std::size_t n);

/// A binomial proportion with its 95% Wilson interval.
struct Estimate {
  std::size_t hits = 0;
  std::size_t samples = 0;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

Estimate wilson(std::size_t hits, std::size_t samples);

/// Pr over random orientations that assign_of(e) is carried through u.
Estimate mc_carried(const DecisionDnnf& b, const Graph& g, NodeId u, std::size_t samples, std::uint64_t seed);

/// h1 = h and h0 = max(0, h - ⌈log₃ k⌉ - 3): the largest window meeting the
/// height-gap condition whose bottom-up branch still has room at h ≥ 4.
Schedule default_schedule(int h, int k);

struct LedgerOptions {
  std::size_t samples = 1000;
  /// Orientations drawn for the per-node carried estimates; 0 means `samples`.
  std::size_t carried_samples = 0;
  std::uint64_t seed = 1;
  /// Analysis parameters; θ is taken from the size class. Empty h0/h1/α
  /// selects default_schedule.
  AnalysisParams params;
  unsigned jobs = 1;
};

struct LedgerRow {
  std::size_t sample = 0;
  NodeId node = 0;
  std::size_t prefix_len = 0;
  std::size_t rank = 0;
  std::string status;  // "ok", "no-triple", "falsified" or "source-small"
};

struct NodeEstimate {
  NodeId node = 0;
  std::size_t observed = 0;  // samples g with u(g) = node
  Estimate carried;
};

struct LedgerReport {
  std::size_t theta = 0;
  std::size_t samples = 0;
  std::size_t carried_samples = 0;
  std::uint64_t seed = 0;
  int h0 = 0;
  int h1 = 0;
  std::vector<LedgerRow> rows;
  std::vector<NodeEstimate> nodes;  // sorted by node id
  double union_sum = 0.0;
  std::size_t falsifications = 0;
  std::size_t no_triple = 0;
  /// Bottleneck positivity checks: the sample itself plus every carried
  /// sample that passes through the recorded node.
  std::size_t elpos_checks = 0;
  std::size_t elpos_violations = 0;

  std::size_t distinct() const { return nodes.size(); }
};

/// The Σ Pr(C_u) ≥ 1 experiment. B must be a valid ∧d-FBDD for φ(G) whose
/// variables are the vertices of G.
LedgerReport distinct_nodes_ledger(const DecisionDnnf& b, const LayeredGraph& g, const SizeClass& sc,
                                   const LedgerOptions& opt);

/// sampleIdx,nodeId,prefixLen,triplerank,carriedEstimate,ciLow,ciHigh
void write_ledger_csv(std::ostream& out, const LedgerReport& r);

}  // namespace dnnflab
