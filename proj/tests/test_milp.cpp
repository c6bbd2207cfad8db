#include <gtest/gtest.h>

#include <map>

#include "random_programs.hpp"
#include "smil/milp.hpp"
#include "smil/oracle.hpp"

using namespace smil;

TEST(Milp, TwoItemKnapsack) {
  Milp p;
  p.base.add_variable(0.0, 1.0, -2.0);
  p.base.add_variable(0.0, 1.0, -3.0);
  p.base.add_row({{0, 1.0}, {1, 1.0}}, Sense::LessEqual, 1.0);
  p.integers = {0, 1};
  const MilpOutcome r = solve_milp(p, 1e-6, 1e-8, 1e-8, 1000);
  ASSERT_EQ(r.status, MilpStatus::Optimal);
  EXPECT_EQ(r.x, (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(r.objective, -3.0);

  const MilpOutcome e = enumerate_milp(p, 16);
  EXPECT_EQ(e.status, MilpStatus::Optimal);
  EXPECT_EQ(e.x, r.x);
  EXPECT_EQ(e.objective, r.objective);
}

TEST(Milp, EmptyIntegerSlice) {
  Milp p;
  p.base.add_variable(0.4, 0.6, 1.0);
  p.integers = {0};
  EXPECT_EQ(solve_milp(p).status, MilpStatus::Infeasible);
  EXPECT_EQ(enumerate_milp(p, 16).status, MilpStatus::Infeasible);
}

TEST(Milp, RejectsUnboundedIntegerColumn) {
  Milp p;
  p.base.add_variable(0.0, kInf, 1.0);
  p.integers = {0};
  EXPECT_THROW(solve_milp(p), std::invalid_argument);
}

TEST(Milp, NodeLimitKeepsIncumbent) {
  // sum of 10 binaries with fractional capacity: needs branching
  Milp p;
  for (int j = 0; j < 10; ++j) {
    p.base.add_variable(0.0, 1.0, -1.0 - 0.1 * j);
    p.integers.push_back(j);
  }
  std::vector<std::pair<int, double>> row;
  for (int j = 0; j < 10; ++j) row.emplace_back(j, 2.0 + 0.3 * j);
  p.base.add_row(row, Sense::LessEqual, 11.3);
  MilpOptions o;
  o.node_limit = 3;
  const MilpOutcome r = solve_milp(p, o);
  EXPECT_EQ(r.status, MilpStatus::NodeLimit);
  EXPECT_LE(r.nodes, 3);
  const MilpOutcome full = solve_milp(p);
  ASSERT_EQ(full.status, MilpStatus::Optimal);
  EXPECT_NEAR(full.objective, enumerate_milp(p, 4096).objective, 1e-9);
}

TEST(Milp, WithoutIntegersReproducesLp) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const LinearProgram lp = testgen::random_lp(seed);
    const MilpOutcome m = solve_milp(Milp{lp, {}});
    const LpOutcome l = solve_lp(lp);
    if (l.status == LpStatus::Optimal) {
      ASSERT_EQ(m.status, MilpStatus::Optimal) << seed;
      EXPECT_EQ(m.x, l.x) << seed;
      EXPECT_EQ(m.objective, l.objective) << seed;
    } else {
      EXPECT_EQ(m.status, MilpStatus::Infeasible) << seed;
    }
  }
}

TEST(MilpProperty, MatchesEnumeration) {
  int optimal = 0, infeasible = 0;
  for (std::uint64_t seed = 5000; seed < 5300; ++seed) {
    const Milp p = testgen::random_milp(seed);
    const MilpOutcome a = solve_milp(p);
    const MilpOutcome b = enumerate_milp(p, 4096);
    ASSERT_EQ(a.status, b.status) << "seed " << seed;
    if (a.status == MilpStatus::Optimal) {
      ++optimal;
      EXPECT_NEAR(a.objective, b.objective, 1e-6) << "seed " << seed;
      for (int j : p.integers) EXPECT_LE(std::abs(a.x[j] - std::round(a.x[j])), 1e-6);
      EXPECT_LE(a.objective - a.best_bound, std::max(1e-8, 1e-8 * std::abs(a.objective)) + 1e-12);
    } else {
      ++infeasible;
    }
  }
  EXPECT_GT(optimal, 100);
  EXPECT_GT(infeasible, 10);
}

TEST(MilpProperty, ChildBoundsNeverBelowParent) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    MilpOptions o;
    o.record_nodes = true;
    const MilpOutcome r = solve_milp(testgen::random_milp(seed), o);
    std::map<int, double> bound;
    for (const auto& n : r.node_log) bound[n.id] = n.lp_bound;
    for (const auto& n : r.node_log) {
      if (n.parent < 0 || n.lp_bound == kInf) continue;
      ASSERT_TRUE(bound.count(n.parent));
      EXPECT_GE(n.lp_bound, bound[n.parent] - 1e-9) << "seed " << seed << " node " << n.id;
    }
  }
}

TEST(MilpProperty, Deterministic) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Milp p = testgen::random_milp(seed);
    const MilpOutcome a = solve_milp(p);
    const MilpOutcome b = solve_milp(p);
    EXPECT_EQ(a.status, b.status);
    EXPECT_EQ(a.x, b.x);
    EXPECT_EQ(a.nodes, b.nodes);
  }
}
