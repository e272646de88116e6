#include <gtest/gtest.h>

#include <random>

#include "dnnflab/compiler.hpp"
#include "dnnflab/error.hpp"
#include "dnnflab/instances.hpp"
#include "oracles.hpp"

using namespace dnnflab;

TEST(Compile, EmptyClauseGivesFalseSink) {
  Cnf f;
  f.num_vars = 3;
  f.clauses = {{{0, true}}, {}};
  DecisionDnnf b = compile(f);
  EXPECT_EQ(b.size(), 1U);
  EXPECT_EQ(b.node(b.source()).kind, NodeKind::kFalse);
  EXPECT_EQ(model_count(b), 0);
}

TEST(Compile, DisjointEdgesSplitIntoComponents) {
  Graph two({"a", "b", "c", "d"}, {{0, 1}, {2, 3}});
  CompileStats st;
  DecisionDnnf b = compile(encode_cnf(two), {}, &st);
  EXPECT_EQ(model_count(b), 9);
  EXPECT_GE(st.conjunctions, 1U);
  EXPECT_EQ(b.node(b.source()).kind, NodeKind::kConj);
  const Node& root = b.node(b.source());
  EXPECT_TRUE(set_disjoint(b.support(root.lo), b.support(root.hi)));
}

TEST(Compile, MatchesBruteForce) {
  std::mt19937 rng(101);
  for (int round = 0; round < 250; ++round) {
    Cnf f = oracle::random_cnf(rng, 10, 20);
    for (Heuristic h : {Heuristic::kLexical, Heuristic::kMostConstrained}) {
      CompileOptions opt;
      opt.heuristic = h;
      DecisionDnnf b = compile(f, opt);
      ASSERT_TRUE(validate(b, SizeClass{f.num_vars}).syntax_ok());
      // Variables absent from the circuit are free.
      BigInt count = model_count(b) << static_cast<unsigned>(f.num_vars - b.vars().size());
      EXPECT_EQ(count, BigInt(oracle::count_models(f))) << "round " << round;
    }
  }
}

TEST(Compile, CacheDoesNotChangeCounts) {
  std::mt19937 rng(5);
  for (int round = 0; round < 60; ++round) {
    Cnf f = oracle::random_cnf(rng, 12, 24);
    CompileOptions on, off;
    off.cache = false;
    EXPECT_EQ(model_count(compile(f, on)), model_count(compile(f, off)));
  }
  CompileStats st;
  compile(encode_cnf(LayeredGraph(2, 2).graph()), {}, &st);
  EXPECT_GT(st.cache_hits, 0U);
}

TEST(Compile, ConjunctionChildrenAreResidualComponents) {
  std::mt19937 rng(77);
  for (int round = 0; round < 60; ++round) {
    Cnf f = oracle::random_cnf(rng, 10, 8);
    DecisionDnnf b = compile(f);
    for (NodeId u = 0; u < b.size(); ++u) {
      const Node& n = b.node(u);
      if (n.kind != NodeKind::kConj) continue;
      const VarSet& l = b.support(n.lo);
      const VarSet& r = b.support(n.hi);
      EXPECT_TRUE(set_disjoint(l, r));
      EXPECT_LE(l.size(), r.size());
    }
  }
}

TEST(Compile, NodeLimitIsACapacityError) {
  CompileOptions opt;
  opt.node_limit = 10;
  EXPECT_THROW(compile(encode_cnf(LayeredGraph(2, 2).graph()), opt), CapacityError);
}

TEST(Compile, ThresholdModeIsImbalanced) {
  for (int h = 1; h <= 3; ++h) {
    LayeredGraph g(h, 2);
    Cnf f = encode_cnf(g.graph());
    for (std::size_t theta : {2U, 3U}) {
      CompileOptions opt;
      opt.theta = theta;
      DecisionDnnf b = compile(f, opt);
      EXPECT_TRUE(validate(b, SizeClass{theta}).ok());
      if (h <= 2) EXPECT_EQ(model_count(b), BigInt(oracle::count_models(f)));
    }
  }
}

TEST(ImbalanceProfile, NoConjunctions) {
  DecisionDnnf b(1, {Node::make_true(), Node::make_false(), Node::decision(0, 1, 0)});
  ImbalanceProfile p = imbalance_profile(b, SizeClass{0});
  EXPECT_TRUE(p.rows.empty());
  EXPECT_EQ(p.alpha_threshold, 0.0);
}

TEST(ImbalanceProfile, TwoLargeChildrenAreBalanced) {
  // Two decision chains over five variables each.
  std::vector<Node> nodes{Node::make_true(), Node::make_false()};
  auto chain = [&](Var first) {
    NodeId cur = 0;
    for (Var v = first; v < first + 5; ++v) {
      nodes.push_back(Node::decision(v, cur, cur));
      cur = static_cast<NodeId>(nodes.size() - 1);
    }
    return cur;
  };
  NodeId l = chain(0), r = chain(5);
  nodes.push_back(Node::conj(l, r));
  DecisionDnnf b(10, nodes);
  ImbalanceProfile p = imbalance_profile(b, SizeClass{4});
  ASSERT_EQ(p.rows.size(), 1U);
  EXPECT_TRUE(p.rows[0].balanced);
  EXPECT_EQ(p.rows[0].left, 5U);
  EXPECT_EQ(p.rows[0].right, 5U);
  EXPECT_EQ(p.n, 10U);
  EXPECT_EQ(p.max_balanced_min, 5U);
  EXPECT_NEAR(p.alpha_threshold, std::log(5.0) / std::log(10.0), 1e-12);
}

TEST(ImbalanceProfile, OneRowPerConjunction) {
  CompileStats st;
  DecisionDnnf b = compile(encode_cnf(LayeredGraph(2, 2).graph()), {}, &st);
  std::size_t conj = 0;
  for (const Node& n : b.nodes()) conj += n.kind == NodeKind::kConj;
  EXPECT_EQ(imbalance_profile(b, SizeClass{3}).rows.size(), conj);
}

TEST(BruteForceCount, AgreesWithOracle) {
  std::mt19937 rng(1);
  for (int round = 0; round < 50; ++round) {
    Cnf f = oracle::random_cnf(rng, 10, 15);
    EXPECT_EQ(brute_force_count(f), oracle::count_models(f));
  }
}
