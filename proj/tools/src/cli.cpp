#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "dnnflab/cnf.hpp"
#include "dnnflab/compiler.hpp"
#include "dnnflab/dnnf.hpp"
#include "dnnflab/error.hpp"
#include "dnnflab/instances.hpp"
#include "dnnflab/permwidth.hpp"
#include "dnnflab/probability.hpp"
#include "dnnflab/triples.hpp"
#include "json_io.hpp"

namespace dnnflab::cli {

namespace {

using io::json;

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ContractError("cannot open " + path);
  return in;
}

// Writes to `path`, or to `out` when the path is empty or "-".
template <class F>
void emit(const std::string& path, std::ostream& out, F&& write) {
  if (path.empty() || path == "-") {
    write(out);
    return;
  }
  std::ofstream f(path);
  if (!f) throw ContractError("cannot write " + path);
  write(f);
}

DecisionDnnf load_circuit(const std::string& path) {
  auto in = open_in(path);
  return read_ddnnf(in);
}

LayeredGraph load_layered(const std::string& path) { return recognize_thk(io::graph_from_json(io::read_json_file(path))); }

struct ScheduleFlags {
  std::optional<int> h0;
  std::optional<int> h1;
  std::optional<double> alpha;

  void attach(CLI::App* app) {
    auto* o0 = app->add_option("--h0", h0, "Lower height of the analysis window");
    auto* o1 = app->add_option("--h1", h1, "Upper height of the analysis window");
    auto* oa = app->add_option("--alpha", alpha, "Derive h0/h1 from the imbalance exponent");
    o0->needs(o1);
    o1->needs(o0);
    oa->excludes(o0)->excludes(o1);
  }
  AnalysisParams params(std::size_t theta) const { return {h0, h1, alpha, theta}; }
};

void print_json(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decision-DNNF laboratory for layered tree-path instances", "dnnflab"};
  app.require_subcommand(1);
  std::function<int()> action;

  // gen-graph
  auto* gg = app.add_subcommand("gen-graph", "Write T[h,k] as graph JSON");
  gg->set_help_flag("--help", "Print this help message and exit");
  int gg_h = 0, gg_k = 0;
  std::string gg_out;
  gg->add_option("--h", gg_h, "Tree height")->required()->check(CLI::Range(0, 38));
  gg->add_option("--k", gg_k, "Path length")->required()->check(CLI::PositiveNumber);
  gg->add_option("-o,--output", gg_out, "Output file (default stdout)");
  gg->callback([&] {
    action = [&] {
      LayeredGraph g(gg_h, gg_k);
      emit(gg_out, out, [&](std::ostream& o) { print_json(o, io::layered_to_json(g)); });
      return kOk;
    };
  });

  // gen-cnf
  auto* gc = app.add_subcommand("gen-cnf", "Encode a graph as its positive 2-CNF");
  std::string gc_in, gc_out, gc_map;
  gc->add_option("graph", gc_in, "Graph JSON")->required();
  gc->add_option("-o,--output", gc_out, "DIMACS output (default stdout)");
  gc->add_option("--map", gc_map, "Write the variable-to-vertex map here");
  gc->callback([&] {
    action = [&] {
      Graph g = io::graph_from_json(io::read_json_file(gc_in));
      Cnf cnf = encode_cnf(g);
      emit(gc_out, out, [&](std::ostream& o) { write_dimacs(o, cnf); });
      if (!gc_map.empty()) {
        json m = json::object();
        for (Vertex v = 0; v < g.num_vertices(); ++v) m[std::to_string(v + 1)] = g.name(v);
        emit(gc_map, out, [&](std::ostream& o) { print_json(o, m); });
      }
      return kOk;
    };
  });

  // compile
  auto* cc = app.add_subcommand("compile", "Compile DIMACS CNF into a Decision DNNF");
  std::string cc_in, cc_out, cc_heur = "lexical";
  std::optional<std::size_t> cc_theta;
  bool cc_nocache = false;
  std::size_t cc_limit = CompileOptions{}.node_limit;
  cc->add_option("cnf", cc_in, "DIMACS input")->required();
  cc->add_option("-o,--output", cc_out, "ddnnf output (default stdout)");
  cc->add_option("--theta", cc_theta, "Keep one side of every conjunction at most this many variables");
  cc->add_option("--heuristic", cc_heur, "Branching heuristic")
      ->check(CLI::IsMember({"lexical", "most-constrained"}));
  cc->add_flag("--no-cache", cc_nocache, "Disable component caching");
  cc->add_option("--node-limit", cc_limit, "Abort past this many nodes");
  cc->callback([&] {
    action = [&] {
      auto in = open_in(cc_in);
      Cnf cnf = read_dimacs(in);
      CompileOptions opt;
      opt.heuristic = cc_heur == "lexical" ? Heuristic::kLexical : Heuristic::kMostConstrained;
      opt.cache = !cc_nocache;
      opt.node_limit = cc_limit;
      opt.theta = cc_theta;
      CompileStats st;
      DecisionDnnf b = compile(cnf, opt, &st);
      emit(cc_out, out, [&](std::ostream& o) { write_ddnnf(o, b); });
      json s = {{"nodes", b.size()},
                {"decisions", st.decisions},
                {"conjunctions", st.conjunctions},
                {"cacheHits", st.cache_hits},
                {"cacheEntries", st.cache_entries}};
      // Stats go to stderr when the circuit itself went to stdout.
      print_json(cc_out.empty() || cc_out == "-" ? err : out, s);
      return kOk;
    };
  });

  // validate
  auto* vc = app.add_subcommand("validate", "Check the syntax and imbalance of a Decision DNNF");
  std::string vc_in;
  std::optional<double> vc_alpha;
  std::optional<std::size_t> vc_theta;
  vc->add_option("circuit", vc_in, "ddnnf input")->required();
  auto* va = vc->add_option("--alpha", vc_alpha, "Imbalance exponent, θ = ⌊n^α⌋");
  auto* vt = vc->add_option("--theta", vc_theta, "Explicit size threshold");
  va->excludes(vt);
  vc->callback([&] {
    action = [&] {
      if (!vc_alpha && !vc_theta) throw CLI::RequiredError("--alpha or --theta");
      DecisionDnnf b = load_circuit(vc_in);
      SizeClass sc = vc_theta ? SizeClass{*vc_theta} : SizeClass::from_alpha(*vc_alpha, b.num_vars());
      ValidationReport r = validate(b, sc);
      print_json(out, io::validation_to_json(r, imbalance_profile(b, sc), sc.theta));
      for (NodeId u : r.read_once_offenders) err << "read-once violated at node " << u << '\n';
      for (NodeId u : r.decomposability_offenders) err << "conjunction " << u << " shares a variable\n";
      for (NodeId u : r.balanced) err << "conjunction " << u << " is balanced\n";
      for (NodeId u : r.unreachable) err << "node " << u << " is unreachable from the source\n";
      if (!r.sink_labels) err << "more than one True or False sink\n";
      return r.ok() ? kOk : kValidationFailure;
    };
  });

  // mainstream
  auto* mc = app.add_subcommand("mainstream", "Trace the mainstream path of a model");
  std::string mc_in, mc_model;
  std::size_t mc_theta = 0;
  mc->add_option("circuit", mc_in, "ddnnf input")->required();
  mc->add_option("--model", mc_model, "Model file (DIMACS literals)")->required();
  mc->add_option("--theta", mc_theta, "Size threshold")->required();
  mc->callback([&] {
    action = [&] {
      DecisionDnnf b = load_circuit(mc_in);
      auto min = open_in(mc_model);
      Assignment g = io::read_model(min, b.num_vars());
      SizeClass sc{mc_theta};
      TargetPath p = mainstream_path(b, g, sc);
      PathProfile prof = path_profile(b, p);
      std::vector<std::uint64_t> order;
      for (Var x : prof.order) order.push_back(std::uint64_t{x} + 1);
      json j = {{"branches", p.branches},
                {"nodes", prof.nodes},
                {"order", order},
                {"end", prof.end},
                {"endSupport", b.support(prof.end).size()},
                {"mainstream", is_mainstream(b, p, sc)}};
      print_json(out, j);
      return kOk;
    };
  });

  // analyze-perm
  auto* ap = app.add_subcommand("analyze-perm", "Extract a target triple from a vertex permutation");
  std::string ap_graph, ap_perm;
  std::size_t ap_theta = 0;
  ScheduleFlags ap_sched;
  ap->add_option("graph", ap_graph, "T[h,k] graph JSON")->required();
  ap->add_option("perm", ap_perm, "Permutation file, one vertex id per line")->required();
  ap->add_option("--theta", ap_theta, "Component-size threshold")->required();
  ap_sched.attach(ap);
  ap->callback([&] {
    action = [&] {
      if (!ap_sched.alpha && !ap_sched.h0) throw CLI::RequiredError("--h0/--h1 or --alpha");
      LayeredGraph g = load_layered(ap_graph);
      auto in = open_in(ap_perm);
      Permutation pi = io::read_permutation(in, g);
      AnalysisResult r = analyze(g, pi, ap_sched.params(ap_theta));
      print_json(out, io::analysis_to_json(g, r));
      return r.report.ok() ? kOk : kValidationFailure;
    };
  });

  // check-triple
  auto* ct = app.add_subcommand("check-triple", "Validate a target triple against a graph");
  std::string ct_graph, ct_triple;
  ct->add_option("graph", ct_graph, "Graph JSON")->required();
  ct->add_option("triple", ct_triple, "Triple JSON")->required();
  ct->callback([&] {
    action = [&] {
      Graph g = io::graph_from_json(io::read_json_file(ct_graph));
      TargetTriple t = io::triple_from_json(g, io::read_json_file(ct_triple));
      TripleReport r = validate_triple(g, t);
      json j = io::triple_report_to_json(g, r);
      j["rank"] = t.rank();
      print_json(out, j);
      if (!r.ok()) err << r.summary(g) << '\n';
      return r.ok() ? kOk : kValidationFailure;
    };
  });

  // prob-set
  auto* ps = app.add_subcommand("prob-set", "Exact probability that a vertex set is all positive");
  std::string ps_graph;
  std::vector<std::string> ps_set;
  ps->add_option("graph", ps_graph, "Graph JSON")->required();
  ps->add_option("--set", ps_set, "Comma-separated vertex ids")->required()->delimiter(',');
  ps->callback([&] {
    action = [&] {
      Graph g = io::graph_from_json(io::read_json_file(ps_graph));
      std::vector<Vertex> vs;
      for (const auto& name : ps_set) vs.push_back(g.at(name));
      VertexSet s = make_var_set(std::move(vs));
      Rational p = pr_set(g, s);
      bool indep = is_independent(g, s);
      json j = {{"set", io::vertex_names(g, s)},
                {"independent", indep},
                {"probability", p.str()},
                {"approx", p.convert_to<double>()}};
      if (indep) {
        Rational bound = beta_bound(s.size());
        j["betaBound"] = bound.str();
        j["withinBound"] = p <= bound;
      }
      print_json(out, j);
      return kOk;
    };
  });

  // experiment ledger
  auto* ex = app.add_subcommand("experiment", "Batch experiments");
  ex->require_subcommand(1);
  auto* el = ex->add_subcommand("ledger", "Distinct-node union-bound ledger");
  std::string el_graph, el_circuit, el_out, el_summary;
  std::size_t el_theta = 0, el_samples = 1000, el_carried = 0;
  std::uint64_t el_seed = 1;
  unsigned el_jobs = 1;
  ScheduleFlags el_sched;
  el->add_option("graph", el_graph, "T[h,k] graph JSON")->required();
  el->add_option("circuit", el_circuit, "ddnnf representing φ(G)")->required();
  el->add_option("--theta", el_theta, "Size threshold")->required();
  el->add_option("--samples", el_samples, "Sampled models");
  el->add_option("--carried-samples", el_carried, "Orientations per carried estimate (default: --samples)");
  el->add_option("--seed", el_seed, "Master seed");
  el->add_option("--jobs", el_jobs, "Worker threads")->check(CLI::PositiveNumber);
  el->add_option("-o,--output", el_out, "Ledger CSV")->required();
  el->add_option("--summary", el_summary, "Also write the summary JSON here");
  el_sched.attach(el);
  el->callback([&] {
    action = [&] {
      LayeredGraph g = load_layered(el_graph);
      DecisionDnnf b = load_circuit(el_circuit);
      LedgerOptions opt;
      opt.samples = el_samples;
      opt.carried_samples = el_carried;
      opt.seed = el_seed;
      opt.jobs = el_jobs;
      opt.params = el_sched.params(el_theta);
      LedgerReport r = distinct_nodes_ledger(b, g, SizeClass{el_theta}, opt);
      emit(el_out, out, [&](std::ostream& o) { write_ledger_csv(o, r); });
      json s = io::ledger_summary_to_json(r);
      if (!el_summary.empty()) emit(el_summary, out, [&](std::ostream& o) { print_json(o, s); });
      print_json(out, s);
      if (r.falsifications > 0) err << r.falsifications << " falsification event(s)\n";
      if (r.elpos_violations > 0) err << r.elpos_violations << " bottleneck positivity violation(s)\n";
      return r.falsifications == 0 && r.elpos_violations == 0 ? kOk : kValidationFailure;
    };
  });

  std::vector<std::string> argv_store{"dnnflab"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    return action ? action() : kUsage;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  } catch (const CapacityError& e) {
    err << "capacity: " << e.what() << '\n';
    return kCapacity;
  } catch (const StructuralError& e) {
    err << "invalid circuit: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const VariableCollision& e) {
    err << "invalid: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace dnnflab::cli
