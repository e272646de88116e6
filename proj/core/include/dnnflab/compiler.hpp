#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "dnnflab/cnf.hpp"
#include "dnnflab/dnnf.hpp"

namespace dnnflab {

enum class Heuristic { kLexical, kMostConstrained };

struct CompileOptions {
  Heuristic heuristic = Heuristic::kLexical;
  bool cache = true;
  std::size_t node_limit = 20'000'000;
  /// When set, every conjunction gets a child with at most `theta` variables:
  /// components above the threshold are chained one after another through
  /// decision nodes instead of being joined by a conjunction.
  std::optional<std::size_t> theta;
};

struct CompileStats {
  std::size_t decisions = 0;
  std::size_t conjunctions = 0;
  std::size_t cache_hits = 0;
  std::size_t cache_entries = 0;
};

/// Exhaustive Decision-DNNF compilation by Shannon expansion with unit
/// propagation, component splitting and caching keyed on the residual
/// clause set. The output mentions every variable of the CNF unless it is the
/// False sink. Throws CapacityError when `node_limit` is exceeded.
DecisionDnnf compile(const Cnf& cnf, const CompileOptions& opt = {}, CompileStats* stats = nullptr);

struct ImbalanceRow {
  NodeId node = 0;
  std::size_t left = 0;
  std::size_t right = 0;
  bool balanced = false;
};

struct ImbalanceProfile {
  std::vector<ImbalanceRow> rows;
  std::size_t n = 0;
  /// Largest min(|left|,|right|) over all conjunctions.
  std::size_t max_min_support = 0;
  /// Largest min(|left|,|right|) over balanced conjunctions (0 if none).
  std::size_t max_balanced_min = 0;
  /// Smallest α with every conjunction α-imbalanced, i.e. log(max_min)/log(n);
  /// 0 when max_min ≤ 1.
  double alpha_threshold = 0.0;
};

ImbalanceProfile imbalance_profile(const DecisionDnnf& b, const SizeClass& sc);

/// Brute-force model count over all 2^num_vars assignments (num_vars ≤ 24).
std::uint64_t brute_force_count(const Cnf& cnf);

}  // namespace dnnflab
