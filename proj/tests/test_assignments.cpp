#include <gtest/gtest.h>

#include <random>

#include "dnnflab/assignments.hpp"
#include "dnnflab/error.hpp"
#include "oracles.hpp"

using namespace dnnflab;

namespace {

constexpr Var x1 = 1, x2 = 2, x3 = 3, x4 = 4;

AssignmentSet random_set(std::mt19937& rng, VarSet universe, double keep) {
  std::bernoulli_distribution pick(keep);
  std::vector<Assignment> ms;
  for (const Assignment& a : AssignmentSet::cube(universe).members())
    if (pick(rng)) ms.push_back(a);
  return AssignmentSet::from_members(std::move(universe), ms);
}

}  // namespace

TEST(Assignment, RejectsDoubleBinding) {
  EXPECT_THROW(Assignment::from_bindings({{x1, true}, {x1, false}}), ContractError);
}

TEST(Project, KeepsIntersection) {
  EXPECT_EQ(project({{x1, true}, {x2, false}}, {x1, x3}), (Assignment{{x1, true}}));
  EXPECT_EQ(project({{x1, true}}, {}), Assignment{});
  EXPECT_EQ(project({{x1, false}, {x2, false}, {x3, true}}, {x2, x3}), (Assignment{{x2, false}, {x3, true}}));
}

TEST(Project, ComposesByIntersection) {
  std::mt19937 rng(11);
  for (int round = 0; round < 200; ++round) {
    std::vector<Binding> b;
    VarSet y, z;
    for (Var v = 0; v < 8; ++v) {
      b.emplace_back(v, rng() & 1U);
      if (rng() & 1U) y.push_back(v);
      if (rng() & 1U) z.push_back(v);
    }
    Assignment a = Assignment::from_bindings(b);
    EXPECT_EQ(project(project(a, y), z), project(a, set_intersection(y, z)));
  }
}

TEST(Restrict, WorkedExample) {
  AssignmentSet h = AssignmentSet::from_members(
      {x1, x2, x3}, {{{x1, false}, {x2, false}, {x3, true}}, {{x1, true}, {x2, true}, {x3, false}}});
  AssignmentSet expect = AssignmentSet::from_members({x2, x3}, {{{x2, true}, {x3, false}}});
  EXPECT_EQ(restrict(h, {{x1, true}}), expect);
  // A binding outside Var(H) has the same effect.
  EXPECT_EQ(restrict(h, {{x1, true}, {x4, false}}), expect);
  EXPECT_EQ(restrict(h, {}), h);
}

TEST(Restrict, MatchesFiltering) {
  std::mt19937 rng(3);
  for (int round = 0; round < 100; ++round) {
    AssignmentSet h = random_set(rng, {0, 1, 2, 3, 4}, 0.4);
    std::vector<Binding> b;
    for (Var v = 0; v < 7; ++v)
      if (rng() % 3 == 0) b.emplace_back(v, rng() & 1U);
    Assignment a = Assignment::from_bindings(b);
    EXPECT_EQ(oracle::member_set(restrict(h, a)), oracle::restrict_members(h, a));
  }
}

TEST(Product, UnitAndEmpty) {
  AssignmentSet h1 = AssignmentSet::from_members({x1}, {{{x1, false}}, {{x1, true}}});
  EXPECT_EQ(product(h1, AssignmentSet::unit()), h1);
  EXPECT_TRUE(product(h1, AssignmentSet::none()).empty());
  AssignmentSet a = AssignmentSet::from_members({x1}, {{{x1, true}}});
  AssignmentSet b = AssignmentSet::from_members({x2}, {{{x2, false}}});
  EXPECT_EQ(product(a, b), AssignmentSet::from_members({x1, x2}, {{{x1, true}, {x2, false}}}));
}

TEST(Product, OverlapIsACollision) {
  AssignmentSet a = AssignmentSet::cube({x1, x2});
  AssignmentSet b = AssignmentSet::cube({x2, x3});
  EXPECT_THROW(product(a, b), VariableCollision);
}

TEST(Product, RestrictionDistributesOverLeftFactor) {
  std::mt19937 rng(5);
  for (int round = 0; round < 100; ++round) {
    AssignmentSet h1 = random_set(rng, {0, 1, 2, 3, 4}, 0.5);
    AssignmentSet h2 = random_set(rng, {5, 6, 7, 8, 9}, 0.5);
    std::vector<Binding> b;
    for (Var v = 0; v < 5; ++v)
      if (rng() & 1U) b.emplace_back(v, rng() & 1U);
    Assignment a = Assignment::from_bindings(b);
    EXPECT_EQ(restrict(product(h1, h2), a), product(restrict(h1, a), h2));
  }
}

TEST(ProductSplit, SmallCases) {
  AssignmentSet eq = AssignmentSet::from_members({0, 1}, {{{0, false}, {1, false}}, {{0, true}, {1, true}}});
  EXPECT_FALSE(is_product_split(eq, {0}));
  EXPECT_TRUE(is_product_split(AssignmentSet::cube({0, 1}), {0}));
  AssignmentSet one = AssignmentSet::from_members({0, 1, 2}, {{{0, true}, {1, false}, {2, true}}});
  EXPECT_TRUE(is_product_split(one, {1}));
  EXPECT_TRUE(is_product_split(one, {0, 2}));
}

TEST(ProductSplit, AgreesWithExplicitProduct) {
  std::mt19937 rng(8);
  for (int round = 0; round < 150; ++round) {
    AssignmentSet h = random_set(rng, {0, 1, 2, 3, 4, 5}, round % 2 ? 0.3 : 0.8);
    if (h.empty()) continue;
    VarSet s;
    for (Var v = 0; v < 6; ++v)
      if (rng() & 1U) s.push_back(v);
    EXPECT_EQ(is_product_split(h, s), oracle::splits_explicitly(h, s));
  }
}

TEST(FinestPartition, Examples) {
  EXPECT_EQ(finest_partition(AssignmentSet::cube({0, 1, 2})), (std::vector<VarSet>{{0}, {1}, {2}}));
  AssignmentSet eq = AssignmentSet::from_members({0, 1}, {{{0, false}, {1, false}}, {{0, true}, {1, true}}});
  EXPECT_EQ(finest_partition(eq), (std::vector<VarSet>{{0, 1}}));
  EXPECT_EQ(finest_partition(product(eq, AssignmentSet::cube({2}))), (std::vector<VarSet>{{0, 1}, {2}}));
  EXPECT_THROW(finest_partition(AssignmentSet::none({0})), ContractError);
}

TEST(Breaks, ProductExample) {
  // H1 over {x1,x2} and H2 over {x3,x4} are each "equal bits", so neither
  // factor splits further.
  auto eq = [](Var a, Var b) {
    return AssignmentSet::from_members({a, b}, {{{a, false}, {b, false}}, {{a, true}, {b, true}}});
  };
  AssignmentSet h = product(eq(x1, x2), eq(x3, x4));
  EXPECT_TRUE(breaks(h, {x2, x3}));
  EXPECT_FALSE(breaks(h, {x1, x2}));
  EXPECT_FALSE(breaks(h, {x3}));
}

TEST(Breaks, AgreesWithBipartitionSearch) {
  std::mt19937 rng(21);
  for (int round = 0; round < 120; ++round) {
    AssignmentSet h = random_set(rng, {0, 1, 2, 3, 4}, round % 3 == 0 ? 0.9 : 0.35);
    if (h.empty()) continue;
    VarSet y;
    for (Var v = 0; v < 5; ++v)
      if (rng() % 3 == 0) y.push_back(v);
    EXPECT_EQ(breaks(h, y), oracle::breaks_naive(h, y)) << "round " << round;
  }
}

TEST(Breaks, UnbrokenSetsSitInOneBlock) {
  std::mt19937 rng(34);
  for (int round = 0; round < 100; ++round) {
    AssignmentSet h = random_set(rng, {0, 1, 2, 3, 4, 5}, 0.6);
    if (h.empty()) continue;
    VarSet y;
    for (Var v = 0; v < 6; ++v)
      if (rng() & 1U) y.push_back(v);
    if (breaks(h, y)) continue;
    auto blocks = finest_partition(h);
    std::size_t holding = 0;
    for (const auto& blk : blocks)
      if (!set_disjoint(blk, y)) ++holding;
    EXPECT_LE(holding, 1U);
  }
}
