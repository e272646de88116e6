#include <benchmark/benchmark.h>

#include <random>

#include "dnnflab/compiler.hpp"
#include "dnnflab/permwidth.hpp"
#include "dnnflab/probability.hpp"

using namespace dnnflab;

static void BM_CompileThk(benchmark::State& state) {
  LayeredGraph g(static_cast<int>(state.range(0)), 2);
  Cnf f = encode_cnf(g.graph());
  CompileOptions opt;
  opt.theta = 3;
  std::size_t nodes = 0;
  for (auto _ : state) nodes = compile(f, opt).size();
  state.counters["nodes"] = static_cast<double>(nodes);
}
BENCHMARK(BM_CompileThk)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);

static void BM_Validate(benchmark::State& state) {
  LayeredGraph g(static_cast<int>(state.range(0)), 2);
  CompileOptions opt;
  opt.theta = 3;
  DecisionDnnf b = compile(encode_cnf(g.graph()), opt);
  for (auto _ : state) benchmark::DoNotOptimize(validate(b, SizeClass{3}).ok());
}
BENCHMARK(BM_Validate)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);

static void BM_AnalyzeRandomOrder(benchmark::State& state) {
  const int h = static_cast<int>(state.range(0));
  LayeredGraph g(h, 2);
  Schedule s = default_schedule(h, 2);
  std::mt19937_64 rng(1);
  std::vector<Vertex> order(g.num_vertices());
  for (Vertex v = 0; v < order.size(); ++v) order[v] = v;
  std::shuffle(order.begin(), order.end(), rng);
  Permutation pi(g, order);
  for (auto _ : state) benchmark::DoNotOptimize(analyze(g, pi, {s.h0, s.h1, std::nullopt, 3}).rank);
}
BENCHMARK(BM_AnalyzeRandomOrder)->DenseRange(3, 7)->Unit(benchmark::kMicrosecond);

static void BM_Ledger(benchmark::State& state) {
  LayeredGraph g(static_cast<int>(state.range(0)), 2);
  CompileOptions co;
  co.theta = 3;
  DecisionDnnf b = compile(encode_cnf(g.graph()), co);
  LedgerOptions opt;
  opt.samples = 200;
  for (auto _ : state) benchmark::DoNotOptimize(distinct_nodes_ledger(b, g, SizeClass{3}, opt).union_sum);
}
BENCHMARK(BM_Ledger)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
