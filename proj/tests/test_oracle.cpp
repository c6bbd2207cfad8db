#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "random_programs.hpp"
#include "smil/bench.hpp"
#include "smil/oracle.hpp"
#include "smil/solver.hpp"

using namespace smil;

namespace {

template <class P>
P reversed_rows(const P& p) {
  P q = p;
  auto& lp = [&]() -> LinearProgram& {
    if constexpr (std::is_same_v<P, Milp>) return q.base;
    else return q;
  }();
  const int m = lp.num_rows();
  for (auto& t : lp.entries) t.row = m - 1 - t.row;
  std::reverse(lp.senses.begin(), lp.senses.end());
  std::reverse(lp.rhs.begin(), lp.rhs.end());
  return q;
}

// Three on/off units feeding two real flows; at least one unit must run.
struct Design {
  MixedIntegerPolyhedron X;
  SmoothObjective objective;
};

Design design_instance() {
  Design d;
  const int x1 = d.X.add_variable(0, 3);
  const int x2 = d.X.add_variable(0, 3);
  const int z1 = d.X.add_variable(0, 1, true);
  const int z2 = d.X.add_variable(0, 1, true);
  const int z3 = d.X.add_variable(0, 1, true);
  d.X.add_row({{x1, 1.0}, {z1, -3.0}}, Sense::LessEqual, 0.0);
  d.X.add_row({{x2, 1.0}, {z2, -2.0}, {z3, -1.0}}, Sense::LessEqual, 0.0);
  d.X.add_row({{z1, 1.0}, {z2, 1.0}, {z3, 1.0}}, Sense::GreaterEqual, 1.0);
  d.X.add_row({{z2, 1.0}, {z3, 1.0}}, Sense::LessEqual, 1.0);
  d.X.add_row({{x1, 1.0}, {x2, 1.0}}, Sense::GreaterEqual, 1.5);
  d.objective =
      SmoothObjective::from_expression(d.X, parse("(x1 - 2.2)^2 + 2*(x2 - 1.7)^2 + 0.3*x1*x2"), {1.1, 0.6, 0.2});
  return d;
}

}  // namespace

TEST(OracleLp, RowPermutationInvariance) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const LinearProgram lp = testgen::random_lp(seed);
    const LpOutcome a = lp_basis_oracle(lp);
    const LpOutcome b = lp_basis_oracle(reversed_rows(lp));
    ASSERT_EQ(a.status, b.status) << seed;
    if (a.status == LpStatus::Optimal) {
      EXPECT_NEAR(a.objective, b.objective, 1e-9) << seed;
    }
  }
}

TEST(OracleLp, SizeLimit) {
  LinearProgram lp;
  for (int j = 0; j < 15; ++j) lp.add_variable(0, 1, 1.0);
  EXPECT_THROW(lp_basis_oracle(lp), std::invalid_argument);
}

TEST(OracleMilp, RowPermutationInvariance) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Milp p = testgen::random_milp(seed);
    const MilpOutcome a = enumerate_milp(p, 4096);
    const MilpOutcome b = enumerate_milp(reversed_rows(p), 4096);
    ASSERT_EQ(a.status, b.status) << seed;
    if (a.status == MilpStatus::Optimal) {
      EXPECT_NEAR(a.objective, b.objective, 1e-9) << seed;
    }
  }
}

TEST(OracleMilp, ComboLimit) {
  Milp p;
  for (int j = 0; j < 3; ++j) {
    p.base.add_variable(0, 9, 1.0);
    p.integers.push_back(j);
  }
  EXPECT_THROW(enumerate_milp(p, 999), std::invalid_argument);
  EXPECT_EQ(enumerate_milp(p, 1000).status, MilpStatus::Optimal);
}

TEST(OracleMinlp, ComplementarityBranches) {
  const MixedIntegerPolyhedron X = build_complementarity(1.0);
  const SmoothObjective f = SmoothObjective::from_expression(X, parse("(x1 - 0.5)^2 + (x2 - 0.8)^2"), {0.1});
  const MinlpEnumeration e = enumerate_minlp(X, f, 16, 3, {}, 7);
  EXPECT_EQ(e.feasible_combos, 2);
  ASSERT_TRUE(e.found);
  // z = 0: u1 = 0, u2 = 0.8 gives 0.25; z = 1: u2 = 0, u1 = 0.5 gives 0.64 + 0.1
  ASSERT_EQ(e.table.size(), 2u);
  EXPECT_NEAR(e.table[0].best_f, 0.25, 1e-8);
  EXPECT_NEAR(e.table[1].best_f, 0.74, 1e-8);
  EXPECT_NEAR(e.f, 0.25, 1e-8);
  EXPECT_NEAR(e.x[1], 0.8, 1e-4);
  EXPECT_EQ(e.x[2], 0.0);
}

TEST(OracleMinlp, InfeasibleRelaxation) {
  MixedIntegerPolyhedron X;
  X.add_variable(0, 1);
  X.add_variable(0, 1, true);
  X.add_row({{0, 1.0}, {1, 1.0}}, Sense::GreaterEqual, 3.0);
  const MinlpEnumeration e =
      enumerate_minlp(X, SmoothObjective::from_expression(X, parse("x1^2"), {0.0}), 16, 2, {}, 1);
  EXPECT_EQ(e.feasible_combos, 0);
  EXPECT_FALSE(e.found);
}

TEST(OracleMinlp, BelowAnySuppliedFeasiblePoint) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const RandomInstance inst = random_instance(seed, 3, 2, 4);
    const MinlpEnumeration e = enumerate_minlp(inst.X, inst.objective, 4096, 2, {}, seed);
    ASSERT_TRUE(e.found) << seed;
    EXPECT_LE(e.f, inst.objective.value(inst.planted) + 1e-9) << seed;
    EXPECT_TRUE(check_feasible(inst.X, e.x).feasible) << seed;
  }
}

TEST(OracleMinlp, DesignInstanceAgreesWithSmil) {
  const Design d = design_instance();
  const MinlpEnumeration e = enumerate_minlp(d.X, d.objective, 64, 3, {}, 11);

  // independent feasibility count: each binary pattern fixed in an LP
  int feasible = 0;
  for (int mask = 0; mask < 8; ++mask) {
    LinearProgram lp = d.X.as_lp({});
    for (int b = 0; b < 3; ++b) lp.lower[2 + b] = lp.upper[2 + b] = (mask >> b) & 1;
    if (solve_lp(lp).status == LpStatus::Optimal) ++feasible;
  }
  EXPECT_EQ(e.feasible_combos, feasible);
  EXPECT_EQ(feasible, 4);

  SolverConfig cfg;
  cfg.refine = true;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  std::bernoulli_distribution coin(0.5);
  double best = kInf;
  for (int s = 0; s < 20; ++s) {
    const std::vector<double> x0{u(rng), u(rng), double(coin(rng)), double(coin(rng)), double(coin(rng))};
    const SolveResult r = solve(d.X, d.objective, x0, cfg);
    ASSERT_EQ(r.status, SolveStatus::Critical) << s;
    best = std::min(best, r.f);
  }
  EXPECT_NEAR(best, e.f, 1e-6);
}
