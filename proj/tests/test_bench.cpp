#include <gtest/gtest.h>

#include <random>

#include "smil/bench.hpp"
#include "smil/solver.hpp"

using namespace smil;

namespace {

int count_rows(const MixedIntegerPolyhedron& X, bool equality) {
  int c = 0;
  for (Sense s : X.senses()) c += (s == Sense::Equal) == equality;
  return c;
}

bool rows_hold(const MixedIntegerPolyhedron& X, const std::vector<double>& x, int first, int count) {
  std::vector<double> act(static_cast<std::size_t>(X.num_rows()), 0.0);
  for (const auto& t : X.entries()) act[static_cast<std::size_t>(t.row)] += t.value * x[static_cast<std::size_t>(t.col)];
  for (int i = first; i < first + count; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const double b = X.rhs()[ui];
    switch (X.senses()[ui]) {
      case Sense::LessEqual: if (act[ui] > b + 1e-12) return false; break;
      case Sense::GreaterEqual: if (act[ui] < b - 1e-12) return false; break;
      case Sense::Equal: if (std::abs(act[ui] - b) > 1e-12) return false; break;
    }
  }
  return true;
}

}  // namespace

TEST(Turbo, Dimensions) {
  for (int N : {1, 5, 25, 50}) {
    TurboParams p;
    p.N = N;
    const Instance inst = build_turbo(p);
    EXPECT_EQ(inst.X.num_vars() - static_cast<int>(inst.X.integers().size()), 5 * (N + 1));
    EXPECT_EQ(static_cast<int>(inst.X.integers().size()), N + 1);
    EXPECT_EQ(count_rows(inst.X, true), 2 * N);
    EXPECT_EQ(count_rows(inst.X, false), 4 * (N + 1) + 4 * N);
  }
  const Instance n25 = build_turbo(TurboParams{});
  EXPECT_EQ(n25.X.num_vars(), 156);
  EXPECT_EQ(count_rows(n25.X, false), 204);
}

TEST(Turbo, RejectsBadParameters) {
  TurboParams p;
  p.N = 0;
  EXPECT_THROW(build_turbo(p), std::invalid_argument);
  p = TurboParams{};
  p.v_minus = 12.0;
  EXPECT_THROW(build_turbo(p), std::invalid_argument);
}

TEST(Turbo, ZeroEffortReachesOnlyTheOrigin) {
  TurboParams p;
  p.N = 1;
  const Instance inst = build_turbo(p);
  const std::vector<double> rest(static_cast<std::size_t>(inst.X.num_vars()), 0.0);
  EXPECT_FALSE(check_feasible(inst.X, rest).feasible);
  MixedIntegerPolyhedron home = inst.X;
  home.set_bounds(TurboLayout{1}.q(1), 0.0, 0.0);
  EXPECT_TRUE(check_feasible(home, rest).feasible);
  EXPECT_EQ(inst.objective.value(rest), 0.0);
}

TEST(Turbo, ObjectiveIsTrapezoidalEffort) {
  TurboParams p;
  p.N = 2;
  const Instance inst = build_turbo(p);
  const TurboLayout L{2};
  std::vector<double> x(static_cast<std::size_t>(L.num_vars()), 0.0);
  for (int k = 0; k <= 2; ++k) {
    x[static_cast<std::size_t>(L.a(k))] = 1.0 + k;
    x[static_cast<std::size_t>(L.b(k))] = 2.0;
  }
  const double h = 5.0;
  const double expect = h * (0.5 * 1 + 4 + 0.5 * 9) + 1e-2 * h * (0.5 * 8 + 8 + 0.5 * 8);
  EXPECT_NEAR(inst.objective.value(x), expect, 1e-12);
}

TEST(Turbo, HysteresisRowsEncodeSwitchingLogic) {
  // on v in [v+ - M, v_max] the four rows hold exactly when w_{k+1} follows the
  // switching rule; below v+ - M the big-M value is too small to be vacuous
  TurboParams p;
  p.N = 1;
  const Instance inst = build_turbo(p);
  const TurboLayout L{1};
  const int first = 2 * p.N + 4 * (p.N + 1);
  for (double v = p.v_plus - p.M; v <= p.v_max; v += 0.25) {
    if (v == p.v_plus || v == p.v_minus) continue;
    for (int w0 = 0; w0 <= 1; ++w0) {
      for (int w1 = 0; w1 <= 1; ++w1) {
        std::vector<double> x(static_cast<std::size_t>(L.num_vars()), 0.0);
        x[static_cast<std::size_t>(L.v(0))] = v;
        x[static_cast<std::size_t>(L.w(0))] = w0;
        x[static_cast<std::size_t>(L.w(1))] = w1;
        const bool next_on = w0 == 0 ? v > p.v_plus : v > p.v_minus;
        EXPECT_EQ(rows_hold(inst.X, x, first, 4), next_on == (w1 == 1)) << v << " " << w0 << w1;
      }
    }
  }
}

TEST(Turbo, SmallHorizonSolutionRespectsHysteresis) {
  // N <= 6 cannot reach q_end within the bounds; 8 is the smallest feasible grid tried
  TurboParams p;
  p.N = 8;
  const Instance inst = build_turbo(p);
  const SolveResult r = solve(inst.X, inst.objective, turbo_initial_guess(p, 3));
  ASSERT_EQ(r.status, SolveStatus::Critical);
  EXPECT_TRUE(r.projected);
  EXPECT_TRUE(check_feasible(inst.X, r.x, 1e-8, 1e-6).feasible);
  EXPECT_EQ(hysteresis_violations(p, r.x), 0);
  EXPECT_LT(r.f, r.f0);
}

TEST(RandomInstance, DeterministicAndFeasible) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const RandomInstance a = random_instance(seed, 4, 3, 6);
    const RandomInstance b = random_instance(seed, 4, 3, 6);
    EXPECT_EQ(a.planted, b.planted);
    EXPECT_EQ(a.X.lower(), b.X.lower());
    EXPECT_EQ(a.X.rhs(), b.X.rhs());
    EXPECT_EQ(to_string(*a.objective.expression()), to_string(*b.objective.expression()));
    EXPECT_TRUE(check_feasible(a.X, a.planted).feasible) << seed;
  }
  EXPECT_THROW(random_instance(1, 0, 0, 1), std::invalid_argument);
}

TEST(RandomInstance, SmilNotWorseThanPlantedPoint) {
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const RandomInstance inst = random_instance(seed, 4, 3, 6);
    const SolveResult r = solve(inst.X, inst.objective, inst.planted);
    ASSERT_EQ(r.status, SolveStatus::Critical) << seed;
    EXPECT_LE(r.f, inst.objective.value(inst.planted) + 1e-9) << seed;
  }
}

TEST(Complementarity, BranchesForceZero) {
  const MixedIntegerPolyhedron X = build_complementarity(1.0);
  EXPECT_FALSE(check_feasible(X, std::vector<double>{0.5, 0.0, 0.0}).feasible);
  EXPECT_TRUE(check_feasible(X, std::vector<double>{0.0, 0.5, 0.0}).feasible);
  EXPECT_FALSE(check_feasible(X, std::vector<double>{0.0, 0.5, 1.0}).feasible);
  EXPECT_TRUE(check_feasible(X, std::vector<double>{0.5, 0.0, 1.0}).feasible);
  EXPECT_THROW(build_complementarity(0.0), std::invalid_argument);
}

TEST(Complementarity, CriticalityMatchesPerBranchClosedForm) {
  // at a corner, psi is the better of staying on the branch (one real direction
  // open) and switching z (the other real direction open, plus the switch cost)
  const double U = 1.0;
  const MixedIntegerPolyhedron X = build_complementarity(U);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> c(-1.0, 1.0), d(0.05, 2.0);
  for (int t = 0; t < 100; ++t) {
    const double c1 = c(rng), c2 = c(rng), c3 = c(rng), delta = d(rng);
    const double r = std::min(delta, U);
    const SmoothObjective f = complementarity_objective(X, c1, c2, c3);
    const double at0 = std::max({0.0, std::max(0.0, -c2) * r, -c3 + std::max(0.0, -c1) * r});
    const double at1 = std::max({0.0, std::max(0.0, -c1) * r, c3 + std::max(0.0, -c2) * r});
    EXPECT_NEAR(criticality_measure(X, f, std::vector<double>{0, 0, 0}, delta, NormKind::LInf).psi, at0, 1e-12);
    EXPECT_NEAR(criticality_measure(X, f, std::vector<double>{0, 0, 1}, delta, NormKind::LInf).psi, at1, 1e-12);
  }
}

TEST(Complementarity, ConeConditionsWithoutIntegerCost) {
  // f2 = 0: critical at (0, 0, z) iff -grad f1 lies in the nonpositive quadrant
  const MixedIntegerPolyhedron X = build_complementarity(1.0);
  for (double c1 : {-1.0, 0.0, 1.0}) {
    for (double c2 : {-1.0, 0.0, 1.0}) {
      const SmoothObjective f = complementarity_objective(X, c1, c2, 0.0);
      const bool cone = c1 >= 0 && c2 >= 0;
      for (double z : {0.0, 1.0}) {
        const double psi = criticality_measure(X, f, std::vector<double>{0, 0, z}, 0.5, NormKind::LInf).psi;
        EXPECT_EQ(psi == 0.0, cone) << c1 << " " << c2 << " z=" << z;
      }
    }
  }
}

TEST(Complementarity, BothCornersAgreeWhenF2Vanishes) {
  const MixedIntegerPolyhedron X = build_complementarity(1.0);
  for (double c1 : {-1.0, 0.0, 1.0}) {
    for (double c2 : {-1.0, 0.0, 1.0}) {
      const SmoothObjective f = complementarity_objective(X, c1, c2, 0.0);
      const double at0 = criticality_measure(X, f, std::vector<double>{0, 0, 0}, 0.5, NormKind::LInf).psi;
      const double at1 = criticality_measure(X, f, std::vector<double>{0, 0, 1}, 0.5, NormKind::LInf).psi;
      EXPECT_EQ(at0 == 0.0, at1 == 0.0) << c1 << " " << c2;
    }
  }
}
