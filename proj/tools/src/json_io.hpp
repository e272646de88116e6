#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "dnnflab/compiler.hpp"
#include "dnnflab/dnnf.hpp"
#include "dnnflab/graph.hpp"
#include "dnnflab/instances.hpp"
#include "dnnflab/permwidth.hpp"
#include "dnnflab/probability.hpp"
#include "dnnflab/triples.hpp"

namespace dnnflab::io {

using nlohmann::json;

// Graph files: {"vertices": [names...], "edges": [[a, b], ...]} plus "h"/"k"
// when the graph is a T[h,k] instance.
json graph_to_json(const Graph& g);
json layered_to_json(const LayeredGraph& g);
Graph graph_from_json(const json& j);

json vertex_names(const Graph& g, const VertexSet& s);
VertexSet vertex_set_from_json(const Graph& g, const json& j);

// Triple files: {"w": [...], "u0": [...], "u1": [...], "theta": T}.
json triple_to_json(const Graph& g, const TargetTriple& t);
TargetTriple triple_from_json(const Graph& g, const json& j);
json triple_report_to_json(const Graph& g, const TripleReport& r);

json analysis_to_json(const LayeredGraph& g, const AnalysisResult& r);
json validation_to_json(const ValidationReport& r, const ImbalanceProfile& p, std::size_t theta);
json ledger_summary_to_json(const LedgerReport& r);

// Permutation files: one vertex id per line; blank lines are ignored.
Permutation read_permutation(std::istream& in, const LayeredGraph& g);
void write_permutation(std::ostream& out, const LayeredGraph& g, const Permutation& pi);

// Model files: DIMACS-style literals ("3" sets variable 3 true, "-3" false),
// optionally prefixed by "v" and terminated by 0, spread over any lines.
Assignment read_model(std::istream& in, std::uint32_t num_vars);

json read_json_file(const std::string& path);

}  // namespace dnnflab::io
