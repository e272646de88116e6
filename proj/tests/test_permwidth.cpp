#include <gtest/gtest.h>

#include <random>

#include "dnnflab/error.hpp"
#include "dnnflab/permwidth.hpp"
#include "oracles.hpp"

using namespace dnnflab;

namespace {

TreeNode node(const LayeredGraph& g, const std::string& code) { return *g.node_from_code(code); }

std::vector<TreeNode> all_nodes(const LayeredGraph& g) { return g.subtree_nodes(LayeredGraph::kRoot); }

PathHost whole_tree_host(const LayeredGraph& g, VertexSet u, TreeNode s_root, int h0) {
  return {std::move(u), all_nodes(g), s_root, h0};
}

std::vector<std::pair<int, int>> gap_pairs(const LayeredGraph& g) {
  std::vector<std::pair<int, int>> out;
  for (int h0 = 0; h0 < g.h(); ++h0)
    for (int h1 = h0 + 1; h1 <= g.h(); ++h1)
      if (h0 + ceil_log3(g.k()) + 1 < h1) out.emplace_back(h0, h1);
  return out;
}

}  // namespace

TEST(Permutation, RejectsNonBijections) {
  LayeredGraph g(1, 1);
  EXPECT_THROW(Permutation(g, {0, 1, 2}), ContractError);
  EXPECT_THROW(Permutation(g, {0, 1, 2, 2}), ContractError);
  Permutation p(g, {3, 1, 0, 2});
  EXPECT_EQ(p.position(0), 2U);
  EXPECT_EQ(p.prefix(2), (VertexSet{1, 3}));
}

TEST(Permutation, StandardOrders) {
  LayeredGraph g(2, 2);
  EXPECT_EQ(bfs_order(g).at(0), g.vertex(LayeredGraph::kRoot, 1));
  EXPECT_EQ(bfs_order(g).at(1), g.vertex(LayeredGraph::kRoot, 2));
  // Pre-order: root, then "0", then "00".
  EXPECT_EQ(dfs_order(g).at(2), g.vertex(node(g, "0"), 1));
  EXPECT_EQ(dfs_order(g).at(4), g.vertex(node(g, "00"), 1));
  Permutation lex = lexicographic_order(g);
  for (std::size_t i = 0; i + 1 < lex.size(); ++i)
    EXPECT_LT(g.graph().name(lex.at(i)), g.graph().name(lex.at(i + 1)));
  Permutation c = complete_lexicographically(g, {5, 3});
  EXPECT_EQ(c.at(0), 5U);
  EXPECT_EQ(c.at(1), 3U);
  EXPECT_EQ(c.size(), g.num_vertices());
}

TEST(Logs, CeilingValues) {
  EXPECT_EQ(ceil_log3(1), 0);
  EXPECT_EQ(ceil_log3(2), 1);
  EXPECT_EQ(ceil_log3(3), 1);
  EXPECT_EQ(ceil_log3(9), 2);
  EXPECT_EQ(ceil_log3(10), 3);
  EXPECT_EQ(ceil_log2(40), 6);
  EXPECT_EQ(ceil_log2(32), 5);
  // h2 = h1 - ⌈log₃ k⌉.
  EXPECT_EQ(10 - ceil_log3(9), 8);
  EXPECT_EQ(5 - ceil_log3(2), 4);
}

TEST(IndexBags, Examples) {
  LayeredGraph g(2, 3);
  TreeNode t = node(g, "1");
  IndexBags ib = index_bags(g, {g.vertex(t, 1), g.vertex(t, 3)});
  EXPECT_EQ(ib.index, (std::vector<int>{1, 3}));
  EXPECT_EQ(ib.bags, (std::vector<TreeNode>{t}));
  EXPECT_EQ(ib.index_t.at(t), (std::vector<int>{1, 3}));
  EXPECT_TRUE(index_bags(g, {}).index.empty());
  EXPECT_TRUE(index_bags(g, {}).bags.empty());

  LayeredGraph g12(1, 2);
  IndexBags top = index_bags(g12, strata(g12, 0, StratumMode::kGt));
  EXPECT_EQ(top.index, (std::vector<int>{1, 2}));
  EXPECT_EQ(top.bags, (std::vector<TreeNode>{LayeredGraph::kRoot}));
}

TEST(IsTd, LastSetStaysUntouched) {
  LayeredGraph g(2, 2);
  // Every leaf subtree except "22", then the higher vertices, then "22".
  std::vector<Vertex> order;
  const TreeNode late = node(g, "22");
  for (TreeNode t : g.nodes_at_height(0))
    if (t != late)
      for (int i = 1; i <= 2; ++i) order.push_back(g.vertex(t, i));
  for (Vertex v : strata(g, 0, StratumMode::kGt)) order.push_back(v);
  order.push_back(g.vertex(late, 1));
  order.push_back(g.vertex(late, 2));
  Permutation pi(g, order);
  TdResult r = is_td(g, pi, 0, 2);
  EXPECT_TRUE(r.td);
  ASSERT_EQ(r.records.size(), 1U);
  EXPECT_EQ(r.records[0].untouched, late);
  EXPECT_EQ(r.records[0].untouched_all, (std::vector<TreeNode>{late}));
}

TEST(IsTd, LeavesFirstFails) {
  LayeredGraph g(2, 2);
  TdResult r = is_td(g, oracle::leaves_first(g), 0, 2);
  EXPECT_FALSE(r.td);
  EXPECT_FALSE(r.records[0].untouched.has_value());
  EXPECT_THROW(is_td(g, bfs_order(g), 1, 1), ContractError);
}

TEST(IsTd, MatchesDefinition) {
  std::mt19937_64 rng(12);
  for (auto [h, k] : {std::pair{2, 2}, std::pair{3, 2}, std::pair{2, 3}}) {
    LayeredGraph g(h, k);
    for (int round = 0; round < 60; ++round) {
      Permutation pi = round == 0 ? oracle::leaves_first(g) : oracle::shuffled(g, rng);
      for (int h0 = 0; h0 < h; ++h0)
        for (int h1 = h0 + 1; h1 <= h; ++h1)
          EXPECT_EQ(is_td(g, pi, h0, h1).td, oracle::td_naive(g, pi, h0, h1)) << h << k << h0 << h1;
    }
  }
}

TEST(BuFromTdFailure, WitnessPassesBothCheckers) {
  std::mt19937_64 rng(4);
  int failures = 0;
  for (auto [h, k] : {std::pair{4, 2}, std::pair{4, 3}, std::pair{5, 2}}) {
    LayeredGraph g(h, k);
    for (int round = 0; round < 30; ++round) {
      Permutation pi = round < 2 ? oracle::leaves_first(g) : oracle::shuffled(g, rng);
      for (auto [h0, h1] : gap_pairs(g)) {
        TdResult td = is_td(g, pi, h0, h1);
        for (const auto& rec : td.records) {
          if (rec.untouched) continue;
          ++failures;
          BuWitness w = bu_from_td_failure(g, pi, h0, h1, rec.t, rec.prefix_len);
          EXPECT_EQ(w.h2, h1 - ceil_log3(k));
          EXPECT_EQ(g.height(w.t), w.h2);
          EXPECT_TRUE(g.is_descendant(w.t, rec.t));
          EXPECT_EQ(w.prefix_len, rec.prefix_len - 1);
          EXPECT_TRUE(check_bu(g, pi, h0, w.t, w.prefix_len));
          EXPECT_TRUE(oracle::bu_naive(g, pi, h0, w.t, w.prefix_len));
        }
      }
    }
  }
  EXPECT_GT(failures, 0);
}

TEST(BuFromTdFailure, RejectsSmallGapAndNonWitness) {
  LayeredGraph g(4, 2);
  Permutation pi = oracle::leaves_first(g);
  EXPECT_THROW(bu_from_td_failure(g, pi, 0, 2, LayeredGraph::kRoot, 10), ContractError);
  Permutation b = bfs_order(g);
  TdResult td = is_td(g, b, 0, 3);
  ASSERT_TRUE(td.td);
  EXPECT_THROW(bu_from_td_failure(g, b, 0, 3, td.records[0].t, td.records[0].prefix_len), ContractError);
}

TEST(PathByIndex, AnchorNeighbourGivesSingleVertex) {
  LayeredGraph g(3, 2);
  PathHost host = whole_tree_host(g, {g.vertex(node(g, "00"), 1)}, node(g, "000"), 0);
  AnchoredPath p = path_by_index(g, host, 1);
  ASSERT_EQ(p.vertices.size(), 1U);
  EXPECT_EQ(p.first(), g.vertex(node(g, "000"), 1));
  EXPECT_FALSE(check_anchored_path(g, p, host.u, 0).has_value());
}

TEST(PathByIndex, HandInstance) {
  LayeredGraph g(3, 2);
  PathHost host = whole_tree_host(g, {g.vertex(node(g, "1"), 1)}, node(g, "000"), 0);
  AnchoredPath p = path_by_index(g, host, 1);
  std::vector<Vertex> expect{g.vertex(LayeredGraph::kRoot, 1), g.vertex(node(g, "0"), 1),
                             g.vertex(node(g, "00"), 1), g.vertex(node(g, "000"), 1)};
  EXPECT_EQ(p.vertices, expect);
  EXPECT_EQ(p.anchor_root, node(g, "000"));
  EXPECT_FALSE(check_anchored_path(g, p, host.u, 0).has_value());
  EXPECT_THROW(path_by_index(g, host, 2), ContractError);
}

TEST(PathByIndex, RejectsAnchorMeetingU) {
  LayeredGraph g(3, 2);
  PathHost host = whole_tree_host(g, {g.vertex(node(g, "1"), 1), g.vertex(node(g, "000"), 2)}, node(g, "000"), 0);
  EXPECT_THROW(path_by_index(g, host, 1), ContractError);
}

TEST(AnchoredPathChecker, CatchesBrokenPaths) {
  LayeredGraph g(3, 2);
  VertexSet u{g.vertex(node(g, "1"), 1)};
  AnchoredPath ok{{g.vertex(LayeredGraph::kRoot, 1), g.vertex(node(g, "0"), 1), g.vertex(node(g, "00"), 1),
                   g.vertex(node(g, "000"), 1)},
                  node(g, "000")};
  EXPECT_FALSE(check_anchored_path(g, ok, u, 0).has_value());
  AnchoredPath gap = ok;
  gap.vertices.erase(gap.vertices.begin() + 1);
  EXPECT_TRUE(check_anchored_path(g, gap, u, 0).has_value());
  AnchoredPath short_end = ok;
  short_end.vertices.pop_back();
  short_end.anchor_root = node(g, "00");
  EXPECT_TRUE(check_anchored_path(g, short_end, u, 0).has_value());
  AnchoredPath far_first = ok;
  far_first.vertices.erase(far_first.vertices.begin());
  EXPECT_TRUE(check_anchored_path(g, far_first, u, 0).has_value());
}

TEST(PathByBag, HandInstance) {
  LayeredGraph g(3, 4);
  const TreeNode t1 = node(g, "1");
  PathHost host = whole_tree_host(g, {g.vertex(t1, 1)}, node(g, "000"), 0);
  AnchoredPath p = path_by_bag(g, host, t1, 3);
  EXPECT_EQ(p.first(), g.vertex(t1, 2));
  EXPECT_EQ(g.bag(p.first()), t1);
  EXPECT_EQ(p.last(), g.vertex(node(g, "000"), 3));
  EXPECT_FALSE(check_anchored_path(g, p, host.u, 0).has_value());
  EXPECT_THROW(path_by_bag(g, host, t1, 2), ContractError);
  EXPECT_THROW(path_by_bag(g, host, node(g, "2"), 3), ContractError);
}

TEST(FamilyByIndex, SpacingAndSize) {
  LayeredGraph g(2, 7);
  const TreeNode t = node(g, "1");
  VertexSet u;
  for (int i = 1; i <= 7; ++i) u.push_back(g.vertex(t, i));
  PathHost host = whole_tree_host(g, u, node(g, "00"), 0);
  FamilyResult r = family_by_index(g, host);
  EXPECT_GE(r.family.size(), 1U);
  EXPECT_EQ(r.candidates, 7U);
  EXPECT_FALSE(check_family(g, r.family, u, 0).has_value());
  const auto& ps = r.family.paths;
  for (std::size_t a = 0; a < ps.size(); ++a)
    for (std::size_t b = a + 1; b < ps.size(); ++b)
      EXPECT_GE(std::abs(g.index(ps[a].first()) - g.index(ps[b].first())), 4);

  PathHost single = whole_tree_host(g, {g.vertex(t, 4)}, node(g, "00"), 0);
  EXPECT_EQ(family_by_index(g, single).family.size(), 1U);
}

TEST(FamilyByIndex, RandomInstancesAreIndependent) {
  std::mt19937_64 rng(8);
  LayeredGraph g(3, 3);
  int built = 0;
  for (int round = 0; round < 60; ++round) {
    Permutation pi = oracle::shuffled(g, rng);
    TdResult td = is_td(g, pi, 0, 3);
    if (!td.td) continue;
    const auto& rec = td.records[0];
    PathHost host = whole_tree_host(g, pi.prefix(rec.prefix_len), *rec.untouched, 0);
    FamilyResult r = family_by_index(g, host);
    EXPECT_FALSE(check_family(g, r.family, host.u, 0).has_value());
    built += r.family.size() > 0;
  }
  EXPECT_GT(built, 0);
}

TEST(FamilyByBags, SpacedBagsOnWideGraph) {
  LayeredGraph g(3, 9);
  VertexSet u;
  for (const char* c : {"1", "2"})
    for (int i = 1; i <= 2; ++i) u.push_back(g.vertex(node(g, c), i));
  u = make_var_set(u);
  PathHost host = whole_tree_host(g, u, node(g, "000"), 0);
  FamilyResult r = family_by_bags(g, host);
  EXPECT_EQ(r.branch, "bags");
  EXPECT_GE(r.family.size(), 1U);
  EXPECT_FALSE(check_family(g, r.family, u, 0).has_value());
  const auto& ps = r.family.paths;
  for (std::size_t a = 0; a < ps.size(); ++a) {
    EXPECT_TRUE(std::binary_search(u.begin(), u.end(), g.vertex(g.bag(ps[a].first()), 1)) ||
                std::binary_search(u.begin(), u.end(), g.vertex(g.bag(ps[a].first()), 2)));
    for (std::size_t b = a + 1; b < ps.size(); ++b)
      EXPECT_GE(g.tree_distance(g.bag(ps[a].first()), g.bag(ps[b].first())), 4);
  }

  PathHost one = whole_tree_host(g, {g.vertex(node(g, "1"), 1)}, node(g, "000"), 0);
  EXPECT_EQ(family_by_bags(g, one).family.size(), 1U);
}

TEST(FamilyByBags, TooNarrowIsACapacityError) {
  LayeredGraph g(3, 2);
  PathHost host = whole_tree_host(g, {g.vertex(node(g, "1"), 1)}, node(g, "000"), 0);
  EXPECT_THROW(family_by_bags(g, host), CapacityError);
}

TEST(FamilyDispatch, Branches) {
  LayeredGraph g4(3, 4);
  VertexSet u;
  for (int i = 1; i <= 4; ++i) u.push_back(g4.vertex(node(g4, "1"), i));
  FamilyResult a = family_dispatch(g4, whole_tree_host(g4, u, node(g4, "000"), 0));
  EXPECT_EQ(a.branch, "index");
  EXPECT_FALSE(check_family(g4, a.family, u, 0).has_value());

  LayeredGraph g9(3, 9);
  VertexSet w;
  for (const char* c : {"@", "1", "2", "11", "12", "21", "22"}) {
    TreeNode t = std::string(c) == "@" ? LayeredGraph::kRoot : node(g9, c);
    for (int i = 1; i <= 2; ++i) w.push_back(g9.vertex(t, i));
  }
  w = make_var_set(w);
  FamilyResult b = family_dispatch(g9, whole_tree_host(g9, w, node(g9, "000"), 0));
  EXPECT_NE(b.branch, "index");
  EXPECT_GE(b.family.size(), 1U);
  EXPECT_FALSE(check_family(g9, b.family, w, 0).has_value());

  EXPECT_THROW(family_dispatch(g4, whole_tree_host(g4, {u[0]}, node(g4, "000"), 0)), ContractError);
}

TEST(TopDown, BoundFormula) {
  EXPECT_DOUBLE_EQ(c_bound(0, 4), 2.0 / 65.0);
  EXPECT_DOUBLE_EQ(c_bound(3, 7), 2.0 / 65.0);
  EXPECT_DOUBLE_EQ(c_bound(0, 3), 1.0 / 65.0);
}

TEST(TopDown, FamiliesGrowWithDepth) {
  LayeredGraph g(5, 2);
  Permutation pi = bfs_order(g);
  ASSERT_TRUE(is_td(g, pi, 0, 1).td);
  TopDownResult r = top_down_triple(g, pi, 0, 1);
  ASSERT_GE(r.sizes.size(), 2U);
  for (std::size_t i = 1; i < r.sizes.size(); ++i) EXPECT_GT(r.sizes[i], r.sizes[i - 1]);
  EXPECT_EQ(r.sizes.back(), r.family.size());
  EXPECT_FALSE(check_family(g, r.family, pi.prefix(r.prefix_len), 0).has_value());
  EXPECT_THROW(top_down_triple(g, oracle::leaves_first(g), 0, 3), ContractError);
}

TEST(AssembleTopDown, SinglePathTriple) {
  LayeredGraph g(3, 2);
  VertexSet u{g.vertex(LayeredGraph::kRoot, 1)};
  PathHost host = whole_tree_host(g, u, node(g, "0"), 2);
  AnchoredPath p = path_by_index(g, host, 1);
  ASSERT_FALSE(check_anchored_path(g, p, u, 2).has_value());
  TargetTriple t = assemble_top_down(g, {{p}}, u, 2, 2);
  TripleReport rep = validate_triple(g.graph(), t);
  EXPECT_TRUE(rep.ok()) << rep.summary(g.graph());
  EXPECT_EQ(t.rank(), 1U);
  EXPECT_THROW(assemble_top_down(g, {{p}}, u, 2, 8), CapacityError);
  EXPECT_THROW(assemble_top_down(g, {{p}}, u, 0, 0), CapacityError);
}

TEST(AssembleTopDown, PipelineRankIsFamilySize) {
  LayeredGraph g(5, 2);
  for (const Permutation& pi : {bfs_order(g), dfs_order(g)}) {
    AnalysisResult r = analyze(g, pi, {2, 5, std::nullopt, 2});
    EXPECT_EQ(r.branch, "td");
    EXPECT_TRUE(r.report.ok()) << r.report.summary(g.graph());
    EXPECT_EQ(r.rank, r.family_size);
  }
}

TEST(AssembleBottomUp, RankCountsLoadedSets) {
  for (int h : {3, 4}) {
    LayeredGraph g(h, 2);
    const TreeNode free = node(g, std::string(static_cast<std::size_t>(h - 1), '0'));
    VertexSet u;
    for (TreeNode r : g.nodes_at_height(1))
      if (r != free) u.push_back(g.vertex(3 * r + 1, 1));
    u = make_var_set(u);
    EXPECT_EQ(easy_free_root(g, u, LayeredGraph::kRoot, 0), free);
    TargetTriple t = assemble_bottom_up(g, u, LayeredGraph::kRoot, 0, 2);
    TripleReport rep = validate_triple(g.graph(), t);
    EXPECT_TRUE(rep.ok()) << rep.summary(g.graph());
    // h2 - h0 - 2 = h - 2: 3^(h-2) - 1 loaded sets.
    EXPECT_EQ(t.rank(), h == 3 ? 2U : 8U);
  }
}

TEST(AssembleBottomUp, NotEasyIsRejected) {
  LayeredGraph g(3, 2);
  VertexSet u{g.vertex(node(g, "0"), 1)};
  EXPECT_FALSE(easy_free_root(g, u, LayeredGraph::kRoot, 0).has_value());
  EXPECT_THROW(assemble_bottom_up(g, u, LayeredGraph::kRoot, 0, 2), ContractError);
}

TEST(Schedule, AlphaArithmetic) {
  Schedule s = alpha_schedule(40, 2, 0.5);
  EXPECT_EQ(s.h0, 22);
  EXPECT_EQ(s.h1, 30);
  EXPECT_EQ(min_height_for_alpha(2, 0.5), 40);
  EXPECT_THROW(alpha_schedule(39, 2, 0.5), CapacityError);
  LayeredGraph g(3, 2);
  AnalysisParams p;
  p.alpha = 0.5;
  p.theta = 2;
  EXPECT_THROW(analyze(g, bfs_order(g), p), CapacityError);
}

TEST(Analyze, ManualWindowsOnT42) {
  LayeredGraph g(4, 2);
  std::mt19937_64 rng(99);
  // (0,2) is below the gap h0 + ⌈log₃ k⌉ + 1 < h1: a triple may be missing,
  // but whatever comes back must be valid.
  std::size_t found = 0;
  for (int round = 0; round < 100; ++round) {
    Permutation pi = round == 0 ? lexicographic_order(g) : oracle::shuffled(g, rng);
    try {
      AnalysisResult r = analyze(g, pi, {0, 2, std::nullopt, 2});
      EXPECT_TRUE(validate_triple(g.graph(), r.triple).ok());
      EXPECT_GE(r.rank, 1U);
      ++found;
    } catch (const Error&) {
    }
  }
  EXPECT_GT(found, 0U);
  for (int round = 0; round < 100; ++round) {
    AnalysisResult r = analyze(g, oracle::shuffled(g, rng), {0, 3, std::nullopt, 2});
    EXPECT_TRUE(r.report.ok()) << r.report.summary(g.graph());
    EXPECT_GE(r.rank, 1U);
    EXPECT_TRUE(validate_triple(g.graph(), r.triple).ok());
  }
}

TEST(Analyze, BottomUpBranch) {
  LayeredGraph g(5, 2);
  AnalysisResult r = analyze(g, oracle::leaves_first(g), {0, 5, std::nullopt, 2});
  EXPECT_EQ(r.branch, "bu");
  ASSERT_TRUE(r.h2.has_value());
  EXPECT_EQ(*r.h2, 4);
  EXPECT_TRUE(r.report.ok()) << r.report.summary(g.graph());
  EXPECT_GE(r.rank, 1U);
}

TEST(Analyze, StandardOrdersOnT52) {
  LayeredGraph g(5, 2);
  for (const Permutation& pi : {bfs_order(g), dfs_order(g), lexicographic_order(g)})
    for (auto [h0, h1] : gap_pairs(g)) {
      AnalysisResult r = analyze(g, pi, {h0, h1, std::nullopt, 3});
      EXPECT_TRUE(r.report.ok()) << h0 << "," << h1 << " " << r.report.summary(g.graph());
      EXPECT_GE(r.rank, 1U);
    }
}
