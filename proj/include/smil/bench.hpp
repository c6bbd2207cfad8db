#pragma once

// Benchmark instances: the hysteretic turbo car, the two-branch
// complementarity set, and seeded random instances for property tests.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "smil/expr.hpp"
#include "smil/model.hpp"

namespace smil {

struct Instance {
  MixedIntegerPolyhedron X;
  SmoothObjective objective;
};

struct TurboParams {
  int N = 25;
  double T = 10.0;
  double alpha_a = 1.0;
  double alpha_b = 1e-2;
  double q_end = 150.0;
  double a_max = 5.0;
  double b_max = 10.0;
  double v_max = 25.0;
  double v_plus = 10.0;
  double v_minus = 5.0;
  double M = 20.0;

  void validate() const {
    if (N < 1) throw std::invalid_argument("turbo: N must be at least 1");
    if (!(T > 0.0 && q_end > 0.0 && a_max > 0.0 && b_max > 0.0 && v_max > 0.0 && M > 0.0))
      throw std::invalid_argument("turbo: T, q_end, bounds and M must be positive");
    if (!(v_minus < v_plus)) throw std::invalid_argument("turbo: v_minus must be below v_plus");
  }
};

/// Column layout of the turbo model: blocks q, v, f, a, b, w of length N+1.
struct TurboLayout {
  int N = 0;
  int q(int k) const { return k; }
  int v(int k) const { return (N + 1) + k; }
  int f(int k) const { return 2 * (N + 1) + k; }
  int a(int k) const { return 3 * (N + 1) + k; }
  int b(int k) const { return 4 * (N + 1) + k; }
  int w(int k) const { return 5 * (N + 1) + k; }
  int num_vars() const { return 6 * (N + 1); }
};

/// Thrust rows for stage k: f - a = 0 when w = 0, f - 3a = 0 when w = 1.
inline std::array<LinearConstraint, 4> turbo_thrust_rows(const TurboLayout& L, int k, double M) {
  const auto off = encode_bigm_equality(L.w(k), false, {{{L.f(k), 1.0}, {L.a(k), -1.0}}, 0.0}, M);
  const auto on = encode_bigm_equality(L.w(k), true, {{{L.f(k), 1.0}, {L.a(k), -3.0}}, 0.0}, M);
  return {off[0], off[1], on[0], on[1]};
}

inline std::string turbo_objective_text(const TurboParams& p) {
  const TurboLayout L{p.N};
  const double h = p.T / p.N;
  const auto var = [](int col) { return "x" + std::to_string(col + 1); };
  std::string a_sum, b_sum;
  for (int k = 0; k <= p.N; ++k) {
    // trapezoid weights: 1/2 at the ends, 1 inside
    const std::string wgt = (k == 0 || k == p.N) ? "0.5*" : "";
    if (k > 0) {
      a_sum += " + ";
      b_sum += " + ";
    }
    a_sum += wgt + var(L.a(k)) + "^2";
    b_sum += wgt + var(L.b(k)) + "^3";
  }
  return detail::format_number(p.alpha_a * h) + "*(" + a_sum + ") + " + detail::format_number(p.alpha_b * h) + "*(" + b_sum + ")";
}

inline Instance build_turbo(const TurboParams& p) {
  p.validate();
  const TurboLayout L{p.N};
  const int N = p.N;
  const double h = p.T / N;
  MixedIntegerPolyhedron X;
  for (int k = 0; k <= N; ++k) X.add_variable(-kInf, kInf, false, "q" + std::to_string(k));
  for (int k = 0; k <= N; ++k) X.add_variable(-p.v_max, p.v_max, false, "v" + std::to_string(k));
  for (int k = 0; k <= N; ++k) X.add_variable(-kInf, kInf, false, "f" + std::to_string(k));
  for (int k = 0; k <= N; ++k) X.add_variable(0.0, p.a_max, false, "a" + std::to_string(k));
  for (int k = 0; k <= N; ++k) X.add_variable(0.0, p.b_max, false, "b" + std::to_string(k));
  for (int k = 0; k <= N; ++k) X.add_variable(0.0, 1.0, true, "w" + std::to_string(k));
  X.set_bounds(L.q(0), 0.0, 0.0);
  X.set_bounds(L.v(0), 0.0, 0.0);
  X.set_bounds(L.w(0), 0.0, 0.0);
  X.set_bounds(L.q(N), p.q_end, p.q_end);
  X.set_bounds(L.v(N), 0.0, 0.0);

  const double hh = 0.5 * h;
  for (int k = 0; k < N; ++k) {
    X.add_row({{L.q(k + 1), 1.0}, {L.q(k), -1.0}, {L.v(k + 1), -hh}, {L.v(k), -hh}}, Sense::Equal, 0.0);
    X.add_row({{L.v(k + 1), 1.0}, {L.v(k), -1.0}, {L.f(k + 1), -hh}, {L.f(k), -hh}, {L.b(k + 1), hh}, {L.b(k), hh}},
              Sense::Equal, 0.0);
  }
  for (int k = 0; k <= N; ++k)
    for (const auto& row : turbo_thrust_rows(L, k, p.M)) X.add_constraint(row);

  const double M = p.M;
  for (int k = 0; k < N; ++k) {
    const int v = L.v(k), w0 = L.w(k), w1 = L.w(k + 1);
    X.add_row({{v, 1.0}, {w0, -M}, {w1, -M}}, Sense::LessEqual, p.v_plus);
    X.add_row({{v, 1.0}, {w0, -M}, {w1, -M}}, Sense::GreaterEqual, p.v_minus - 2.0 * M);
    X.add_row({{v, 1.0}, {w0, M}, {w1, -M}}, Sense::GreaterEqual, p.v_plus - M);
    X.add_row({{v, 1.0}, {w0, M}, {w1, -M}}, Sense::LessEqual, p.v_minus + M);
  }

  Expression f1 = parse(turbo_objective_text(p));
  SmoothObjective obj = SmoothObjective::from_expression(X, std::move(f1));
  return {std::move(X), std::move(obj)};
}

/// Initial guess drawn entrywise from N(0, 10^2); infeasible in general.
inline std::vector<double> turbo_initial_guess(const TurboParams& p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 10.0);
  std::vector<double> x(static_cast<std::size_t>(TurboLayout{p.N}.num_vars()));
  for (double& v : x) v = normal(rng);
  return x;
}

struct TurboTrajectory {
  std::vector<double> t, q, v, w, a, b;
};

inline TurboTrajectory decode_turbo(const TurboParams& p, std::span<const double> x) {
  const TurboLayout L{p.N};
  TurboTrajectory tr;
  const double h = p.T / p.N;
  for (int k = 0; k <= p.N; ++k) {
    const auto at = [&](int col) { return x[static_cast<std::size_t>(col)]; };
    tr.t.push_back(h * k);
    tr.q.push_back(at(L.q(k)));
    tr.v.push_back(at(L.v(k)));
    tr.w.push_back(at(L.w(k)));
    tr.a.push_back(at(L.a(k)));
    tr.b.push_back(at(L.b(k)));
  }
  return tr;
}

/// Number of stages k < N violating the switching logic (with tolerance tol):
/// v_k > v+ with the turbo off at k and k+1, or v_k < v- with it on at both.
inline int hysteresis_violations(const TurboParams& p, std::span<const double> x, double tol = 1e-8) {
  const TurboTrajectory tr = decode_turbo(p, x);
  int bad = 0;
  for (int k = 0; k < p.N; ++k) {
    const bool w0 = std::round(tr.w[static_cast<std::size_t>(k)]) == 1.0;
    const bool w1 = std::round(tr.w[static_cast<std::size_t>(k) + 1]) == 1.0;
    const double v = tr.v[static_cast<std::size_t>(k)];
    if (v > p.v_plus + tol && !w0 && !w1) ++bad;
    if (v < p.v_minus - tol && w0 && w1) ++bad;
  }
  return bad;
}

/// {0 <= u1 <= U z, 0 <= u2 <= U (1 - z), z binary} over columns (u1, u2, z).
inline MixedIntegerPolyhedron build_complementarity(double U) {
  if (!(U > 0.0)) throw std::invalid_argument("complementarity: U must be positive");
  MixedIntegerPolyhedron X;
  const int u1 = X.add_variable(0.0, U, false, "u1");
  const int u2 = X.add_variable(0.0, U, false, "u2");
  const int z = X.add_variable(0.0, 1.0, true, "z");
  X.add_row({{u1, 1.0}, {z, -U}}, Sense::LessEqual, 0.0);
  X.add_row({{u2, 1.0}, {z, U}}, Sense::LessEqual, U);
  return X;
}

/// Linear objective c1 u1 + c2 u2 + c3 z on the complementarity columns.
inline SmoothObjective complementarity_objective(const MixedIntegerPolyhedron& X, double c1, double c2, double c3) {
  const std::string text = detail::format_number(c1) + "*x1 + " + detail::format_number(c2) + "*x2";
  return SmoothObjective::from_expression(X, parse(text), {c3});
}

struct RandomInstance {
  MixedIntegerPolyhedron X;
  SmoothObjective objective;
  std::vector<double> planted;  // feasible by construction
};

/// Real variables first, then integers. Rows are built around a planted
/// point with positive slack; a few equality rows touch real variables only.
/// f1 = 0.5 |L u|^2 + 0.05 |u|^2 + <c, u>, f2 random.
inline RandomInstance random_instance(std::uint64_t seed, int n_real, int n_int, int m_rows) {
  if (n_real < 0 || n_int < 0 || m_rows < 0 || n_real + n_int == 0) throw std::invalid_argument("random_instance: bad sizes");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  const auto round6 = [](double v) { return std::round(v * 1e6) / 1e6; };

  RandomInstance inst;
  const int n = n_real + n_int;
  std::vector<double> x0(static_cast<std::size_t>(n));
  for (int j = 0; j < n_real; ++j) {
    const double lo = -round6(uniform(1.0, 5.0));
    const double hi = round6(uniform(1.0, 5.0));
    inst.X.add_variable(lo, hi, false);
    x0[static_cast<std::size_t>(j)] = round6(uniform(0.8 * lo, 0.8 * hi));
  }
  for (int j = 0; j < n_int; ++j) {
    const double hi = static_cast<double>(1 + static_cast<int>(unit(rng) * 3.0) % 3);
    inst.X.add_variable(0.0, hi, true);
    x0[static_cast<std::size_t>(n_real + j)] = std::floor(unit(rng) * (hi + 1.0));
  }
  for (int i = 0; i < m_rows; ++i) {
    const bool equality = n_real >= 2 && unit(rng) < 0.15;
    const int span = equality ? n_real : n;
    Terms terms;
    for (int j = 0; j < span; ++j)
      if (unit(rng) < 0.6) terms.emplace_back(j, round6(uniform(-2.0, 2.0)));
    if (terms.empty()) terms.emplace_back(static_cast<int>(unit(rng) * span) % span, 1.0);
    double act = 0.0;
    for (const auto& [j, c] : terms) act += c * x0[static_cast<std::size_t>(j)];
    if (equality) {
      inst.X.add_row(terms, Sense::Equal, act);
    } else if (unit(rng) < 0.5) {
      inst.X.add_row(terms, Sense::LessEqual, act + round6(uniform(0.05, 1.0)));
    } else {
      inst.X.add_row(terms, Sense::GreaterEqual, act - round6(uniform(0.05, 1.0)));
    }
  }

  std::string text = "0";
  const auto var = [](int j) { return "x" + std::to_string(j + 1); };
  for (int r = 0; r < n_real; ++r) {
    std::string lin;
    for (int j = 0; j < n_real; ++j) {
      const double c = round6(uniform(-1.0, 1.0));
      lin += (lin.empty() ? "" : " + ") + detail::format_number(c) + "*" + var(j);
    }
    text += " + 0.5*(" + lin + ")^2";
  }
  for (int j = 0; j < n_real; ++j)
    text += " + 0.05*" + var(j) + "^2 + " + detail::format_number(round6(uniform(-2.0, 2.0))) + "*" + var(j);
  std::vector<double> f2(static_cast<std::size_t>(n_int));
  for (double& c : f2) c = round6(uniform(-1.0, 1.0));
  inst.objective = SmoothObjective::from_expression(inst.X, parse(text), std::move(f2));
  inst.planted = std::move(x0);
  return inst;
}

}  // namespace smil
