#pragma once

// Sequential mixed-integer linearization with a trust region on the real
// variables and a nonmonotone (averaged) merit acceptance test.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <variant>
#include <vector>

#include "smil/milp.hpp"
#include "smil/model.hpp"
#include "smil/refine.hpp"

namespace smil {

/// Radius update driven by rho = a / psi:
/// shrink below rho1, keep in [rho1, rho2), grow at or above rho2.
struct ClassicRule {
  double rho1 = 0.1;
  double rho2 = 0.2;
};

/// Grow by 1/kappa, then clamp into [delta_min, delta_max].
struct ResetRule {
  double delta_min = 1e-6;
  double delta_max = 1e3;
};

using TrustRegionRule = std::variant<ClassicRule, ResetRule>;

struct SolverConfig {
  double eps = 1e-8;
  double delta0 = 1.0;
  double rho = 0.1;       // acceptance threshold on a / psi
  double kappa = 0.5;     // radius reduction factor
  double kappa_m = 0.5;   // merit averaging weight, 1 gives a monotone method
  NormKind norm = NormKind::LInf;
  TrustRegionRule rule = ClassicRule{0.1, 0.2};
  int max_outer_iterations = 1000;
  int max_backtracks = 60;
  bool refine = false;
  RefineConfig refine_config{};  // tolerance is overridden by eps
  double f_floor = -1e12;
  double negative_tol = 1e-9;
  MilpOptions milp{};

  /// Throws std::invalid_argument when a parameter is out of range.
  void validate() const {
    const auto require = [](bool ok, const char* what) {
      if (!ok) throw std::invalid_argument(what);
    };
    require(eps >= 0.0, "eps must be nonnegative");
    require(delta0 > 0.0, "delta0 must be positive");
    require(rho > 0.0 && rho < 1.0, "rho must lie in (0,1)");
    require(kappa > 0.0 && kappa < 1.0, "kappa must lie in (0,1)");
    require(kappa_m > 0.0 && kappa_m <= 1.0, "kappa_m must lie in (0,1]");
    require(max_outer_iterations >= 0 && max_backtracks >= 0, "iteration limits must be nonnegative");
    if (const auto* c = std::get_if<ClassicRule>(&rule)) {
      require(rho <= c->rho1 && c->rho1 < c->rho2 && c->rho2 < 1.0, "classic rule needs rho <= rho1 < rho2 < 1");
    } else {
      const auto& r = std::get<ResetRule>(rule);
      require(r.delta_min > 0.0 && r.delta_min <= r.delta_max, "reset rule needs 0 < delta_min <= delta_max");
    }
  }
};

enum class SolveStatus : std::uint8_t {
  Critical,
  IterationLimit,
  BacktrackLimit,
  MilpSubproblemInfeasible,
  NegativeCriticality,
  ObjectiveDiverging,
  MilpFailure,
  ProblemInfeasible,
};

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Critical: return "critical";
    case SolveStatus::IterationLimit: return "iteration_limit";
    case SolveStatus::BacktrackLimit: return "backtrack_limit";
    case SolveStatus::MilpSubproblemInfeasible: return "milp_subproblem_infeasible";
    case SolveStatus::NegativeCriticality: return "negative_criticality";
    case SolveStatus::ObjectiveDiverging: return "objective_diverging";
    case SolveStatus::MilpFailure: return "milp_failure";
    case SolveStatus::ProblemInfeasible: return "problem_infeasible";
  }
  return "?";
}

/// One accepted iteration k: the step from x^k to x^{k+1}.
struct IterationRecord {
  int k = 0;
  std::vector<double> x;  // x^{k+1}
  std::vector<double> w;  // subproblem minimizer, before refinement
  double f_w = 0.0;       // f(w)
  double f_prev = 0.0;    // f(x^k)
  double f = 0.0;         // f(x^{k+1}), after refinement
  double m_prev = 0.0;    // m_k
  double m = 0.0;         // m_{k+1}
  double delta = 0.0;     // accepted radius
  double psi = 0.0;
  double a = 0.0;
  double rho = 0.0;
  int backtracks = 0;
  int milp_solves = 0;
  long milp_nodes = 0;
  bool refined = false;
  bool integers_changed = false;
};

struct SolveResult {
  SolveStatus status = SolveStatus::MilpFailure;
  std::vector<double> x;
  double f = 0.0;
  double final_psi = 0.0;
  double final_delta = 0.0;
  int iterations = 0;  // accepted steps
  int milp_solves = 0;
  long milp_nodes = 0;
  int refinements = 0;
  bool projected = false;
  double projection_seconds = 0.0;
  double solve_seconds = 0.0;
  double f0 = 0.0;
  std::vector<IterationRecord> trace;
};

/// Trust-region subproblem at `center`: minimize <g, x - center> over
/// X intersected with the PL-ball of radius delta. The objective offset makes
/// the optimal value equal to -psi. For the l1 ball, one auxiliary column per
/// real variable is appended after the original columns.
inline Milp build_tr_subproblem(const MixedIntegerPolyhedron& X, std::span<const double> center, std::span<const double> g,
                                double delta, NormKind norm) {
  if (!(delta > 0.0)) throw std::invalid_argument("trust-region radius must be positive");
  const auto n = static_cast<std::size_t>(X.num_vars());
  if (center.size() != n || g.size() != n) throw std::invalid_argument("build_tr_subproblem: dimension mismatch");
  Milp sub = X.as_milp(g);
  sub.base.objective_offset = -std::inner_product(g.begin(), g.end(), center.begin(), 0.0);
  if (norm == NormKind::LInf) {
    for (std::size_t j = 0; j < n; ++j) {
      if (X.integer_mask()[j]) continue;
      double lo = std::max(sub.base.lower[j], center[j] - delta);
      double hi = std::min(sub.base.upper[j], center[j] + delta);
      if (lo > hi) lo = hi = std::clamp(center[j], sub.base.lower[j], sub.base.upper[j]);
      sub.base.lower[j] = lo;
      sub.base.upper[j] = hi;
    }
  } else {
    Terms budget;
    for (std::size_t j = 0; j < n; ++j) {
      if (X.integer_mask()[j]) continue;
      const int t = sub.base.add_variable(0.0, delta, 0.0);
      const int col = static_cast<int>(j);
      sub.base.add_row({{t, 1.0}, {col, -1.0}}, Sense::GreaterEqual, -center[j]);
      sub.base.add_row({{t, 1.0}, {col, 1.0}}, Sense::GreaterEqual, center[j]);
      budget.emplace_back(t, 1.0);
    }
    if (!budget.empty()) sub.base.add_row(budget, Sense::LessEqual, delta);
  }
  return sub;
}

inline double tr_update(double rho_k, double delta_k, const TrustRegionRule& rule, double kappa) {
  if (const auto* c = std::get_if<ClassicRule>(&rule)) {
    if (rho_k < c->rho1) return kappa * delta_k;
    if (rho_k < c->rho2) return delta_k;
    return delta_k / kappa;
  }
  const auto& r = std::get<ResetRule>(rule);
  return std::clamp(delta_k / kappa, r.delta_min, r.delta_max);
}

enum class CriticalityStatus : std::uint8_t { Ok, NegativeCriticality, SubproblemInfeasible, MilpFailure };

struct CriticalityResult {
  CriticalityStatus status = CriticalityStatus::MilpFailure;
  double psi = 0.0;
  std::vector<double> minimizer;  // trial point w, original columns only
  long milp_nodes = 0;
};

namespace detail {

inline CriticalityResult solve_tr_subproblem(const MixedIntegerPolyhedron& X, std::span<const double> x,
                                             std::span<const double> g, double delta, NormKind norm,
                                             const MilpOptions& milp, double negative_tol) {
  CriticalityResult res;
  const Milp sub = build_tr_subproblem(X, x, g, delta, norm);
  const MilpOutcome out = solve_milp(sub, milp);
  res.milp_nodes = out.nodes;
  if (out.status == MilpStatus::Infeasible) {
    res.status = CriticalityStatus::SubproblemInfeasible;
    return res;
  }
  if (out.x.empty() || (out.status != MilpStatus::Optimal && out.status != MilpStatus::NodeLimit)) {
    res.status = CriticalityStatus::MilpFailure;
    return res;
  }
  const auto n = static_cast<std::size_t>(X.num_vars());
  res.minimizer.assign(out.x.begin(), out.x.begin() + static_cast<std::ptrdiff_t>(n));
  double psi = 0.0;
  for (std::size_t j = 0; j < n; ++j) psi += g[j] * (x[j] - res.minimizer[j]);
  if (psi < -negative_tol) {
    res.status = CriticalityStatus::NegativeCriticality;
    res.psi = psi;
    return res;
  }
  res.psi = std::max(psi, 0.0);
  res.status = CriticalityStatus::Ok;
  return res;
}

}  // namespace detail

/// psi(x; delta) = max <grad f(x), x - w> over w in X within PL-distance delta.
inline CriticalityResult criticality_measure(const MixedIntegerPolyhedron& X, const SmoothObjective& objective,
                                             std::span<const double> x, double delta, NormKind norm,
                                             const MilpOptions& milp = {}, double negative_tol = 1e-9) {
  if (delta < 0.0) throw std::invalid_argument("radius must be nonnegative");
  if (delta == 0.0) {
    CriticalityResult r;
    r.status = CriticalityStatus::Ok;
    r.minimizer.assign(x.begin(), x.end());
    return r;
  }
  const std::vector<double> g = objective.gradient(x);
  return detail::solve_tr_subproblem(X, x, g, delta, norm, milp, negative_tol);
}

struct ProjectionResult {
  MilpStatus status = MilpStatus::SolverFailure;
  std::vector<double> x;
  double distance = kInf;
  long milp_nodes = 0;
};

/// Nearest point of X to x0 in the l1 norm (all entries).
inline ProjectionResult initial_projection(const MixedIntegerPolyhedron& X, std::span<const double> x0,
                                           const MilpOptions& milp = {}) {
  const auto n = static_cast<std::size_t>(X.num_vars());
  if (x0.size() != n) throw std::invalid_argument("initial_projection: dimension mismatch");
  // x - d+ + d- = x0 with d+, d- >= 0: one row per column instead of two
  Milp p = X.as_milp({});
  for (std::size_t j = 0; j < n; ++j) {
    const int up = p.base.add_variable(0.0, kInf, 1.0);
    const int down = p.base.add_variable(0.0, kInf, 1.0);
    p.base.add_row({{static_cast<int>(j), 1.0}, {up, -1.0}, {down, 1.0}}, Sense::Equal, x0[j]);
  }
  const MilpOutcome out = solve_milp(p, milp);
  ProjectionResult res;
  res.status = out.status;
  res.milp_nodes = out.nodes;
  if (!out.x.empty()) {
    res.x.assign(out.x.begin(), out.x.begin() + static_cast<std::ptrdiff_t>(n));
    res.distance = 0.0;
    for (std::size_t j = 0; j < n; ++j) res.distance += std::abs(res.x[j] - x0[j]);
  }
  return res;
}

/// argmin over X of ||center - gamma grad f(center) - x||_p (full norm).
inline ProjectionResult projected_gradient_step(const MixedIntegerPolyhedron& X, const SmoothObjective& objective,
                                                std::span<const double> center, double gamma, NormKind norm,
                                                const MilpOptions& milp = {}) {
  if (!(gamma > 0.0)) throw std::invalid_argument("step size must be positive");
  const auto n = static_cast<std::size_t>(X.num_vars());
  const std::vector<double> g = objective.gradient(center);
  std::vector<double> target(n);
  for (std::size_t j = 0; j < n; ++j) target[j] = center[j] - gamma * g[j];
  Milp p = X.as_milp({});
  if (norm == NormKind::L1) {
    for (std::size_t j = 0; j < n; ++j) {
      const int up = p.base.add_variable(0.0, kInf, 1.0);
      const int down = p.base.add_variable(0.0, kInf, 1.0);
      p.base.add_row({{static_cast<int>(j), 1.0}, {up, -1.0}, {down, 1.0}}, Sense::Equal, target[j]);
    }
  } else {
    const int t = p.base.add_variable(0.0, kInf, 1.0);
    for (std::size_t j = 0; j < n; ++j) {
      const int col = static_cast<int>(j);
      p.base.add_row({{t, 1.0}, {col, -1.0}}, Sense::GreaterEqual, -target[j]);
      p.base.add_row({{t, 1.0}, {col, 1.0}}, Sense::GreaterEqual, target[j]);
    }
  }
  const MilpOutcome out = solve_milp(p, milp);
  ProjectionResult res;
  res.status = out.status;
  res.milp_nodes = out.nodes;
  if (!out.x.empty()) {
    res.x.assign(out.x.begin(), out.x.begin() + static_cast<std::ptrdiff_t>(n));
    std::vector<double> diff(n);
    for (std::size_t j = 0; j < n; ++j) diff[j] = res.x[j] - target[j];
    res.distance = full_norm(norm, diff);
  }
  return res;
}

inline SolveResult solve(const MixedIntegerPolyhedron& X, const SmoothObjective& objective, std::span<const double> x0,
                         const SolverConfig& config = {}) {
  using Clock = std::chrono::steady_clock;
  config.validate();
  const auto n = static_cast<std::size_t>(X.num_vars());
  if (x0.size() != n) throw std::invalid_argument("solve: initial point has wrong dimension");
  SolveResult res;

  std::vector<double> x(x0.begin(), x0.end());
  if (!check_feasible(X, x, config.milp.lp.feas_tol * 10.0, config.milp.int_tol).feasible) {
    const auto t0 = Clock::now();
    ProjectionResult proj = initial_projection(X, x, config.milp);
    res.projection_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    res.projected = true;
    if (proj.x.empty()) {
      res.status = proj.status == MilpStatus::Infeasible ? SolveStatus::ProblemInfeasible : SolveStatus::MilpFailure;
      return res;
    }
    x = std::move(proj.x);
  } else {
    for (int j : X.integers()) x[static_cast<std::size_t>(j)] = std::round(x[static_cast<std::size_t>(j)]) + 0.0;
  }

  const auto t_start = Clock::now();
  std::vector<double> g;
  double fx = objective.value_and_gradient(x, g);
  double m = fx;
  double delta = config.delta0;
  res.f0 = fx;
  RefineConfig rcfg = config.refine_config;
  rcfg.tolerance = config.eps;

  const auto finish = [&](SolveStatus s) {
    res.status = s;
    res.x = x;
    res.f = fx;
    res.final_delta = delta;
    res.solve_seconds = std::chrono::duration<double>(Clock::now() - t_start).count();
    return res;
  };

  for (int k = 0;; ++k) {
    if (k >= config.max_outer_iterations) return finish(SolveStatus::IterationLimit);
    IterationRecord rec;
    rec.k = k;
    rec.f_prev = fx;
    rec.m_prev = m;
    std::vector<double> trial;
    double f_trial = 0.0;
    double psi = 0.0;
    double a = 0.0;
    for (;;) {
      CriticalityResult sub = detail::solve_tr_subproblem(X, x, g, delta, config.norm, config.milp, config.negative_tol);
      ++res.milp_solves;
      ++rec.milp_solves;
      res.milp_nodes += sub.milp_nodes;
      rec.milp_nodes += sub.milp_nodes;
      res.final_psi = sub.psi;
      switch (sub.status) {
        case CriticalityStatus::SubproblemInfeasible: return finish(SolveStatus::MilpSubproblemInfeasible);
        case CriticalityStatus::MilpFailure: return finish(SolveStatus::MilpFailure);
        case CriticalityStatus::NegativeCriticality: return finish(SolveStatus::NegativeCriticality);
        case CriticalityStatus::Ok: break;
      }
      psi = sub.psi;
      if (psi <= config.eps) return finish(SolveStatus::Critical);
      trial = std::move(sub.minimizer);
      try {
        f_trial = objective.value(trial);
      } catch (const DomainError&) {
        f_trial = kInf;
      }
      a = m - f_trial;
      if (a >= config.rho * psi) break;
      delta *= config.kappa;
      if (++rec.backtracks > config.max_backtracks) return finish(SolveStatus::BacktrackLimit);
    }

    rec.delta = delta;
    rec.psi = psi;
    rec.a = a;
    rec.rho = a / psi;
    for (int j : X.integers()) {
      const auto uj = static_cast<std::size_t>(j);
      if (trial[uj] != x[uj]) rec.integers_changed = true;
    }
    rec.w = trial;
    rec.f_w = f_trial;
    if (config.refine && !rec.integers_changed) {
      RefineResult r = refine_fixed_integer(X, objective, trial, rcfg);
      ++res.refinements;
      if (r.f < f_trial) {
        trial = std::move(r.x);
        f_trial = r.f;
        rec.refined = true;
      }
    }

    x = std::move(trial);
    fx = objective.value_and_gradient(x, g);
    m = (1.0 - config.kappa_m) * m + config.kappa_m * fx;
    rec.f = fx;
    rec.m = m;
    rec.x = x;
    res.trace.push_back(std::move(rec));
    ++res.iterations;
    delta = tr_update(res.trace.back().rho, delta, config.rule, config.kappa);
    if (fx < config.f_floor) return finish(SolveStatus::ObjectiveDiverging);
  }
}

}  // namespace smil
