#pragma once

// Fixed-integer refinement: away-step conditional gradient (Frank-Wolfe) over
// the polytope obtained by freezing the integer entries. Steps start at the
// minimizer of a quadratic fit along the segment, then backtrack (Armijo).

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "smil/lp.hpp"
#include "smil/model.hpp"

namespace smil {

struct RefineConfig {
  double tolerance = 1e-8;  // conditional-gradient gap target
  int max_iterations = 500;
  double sufficient_decrease = 1e-4;
  double backtrack = 0.5;
  LpOptions lp;
};

enum class RefineStatus : std::uint8_t { Converged, IterationLimit, Stalled, LpFailure };

struct RefineResult {
  RefineStatus status = RefineStatus::LpFailure;
  std::vector<double> x;
  double f = 0.0;
  double gap = kInf;  // gap at the returned point (last evaluated)
  int iterations = 0;
  int lp_solves = 0;
  std::vector<double> gap_history;
  std::vector<double> f_history;
};

/// Decreases f over {w in X : w_I = x_I} starting from the feasible point x.
/// The integer block of the result is bitwise identical to that of x.
inline RefineResult refine_fixed_integer(const MixedIntegerPolyhedron& X, const SmoothObjective& objective,
                                         std::span<const double> x0, const RefineConfig& cfg = {}) {
  const auto n = static_cast<std::size_t>(X.num_vars());
  RefineResult res;
  res.x.assign(x0.begin(), x0.end());

  LinearProgram lp = X.as_lp({});
  for (int j : X.integers()) {
    const auto uj = static_cast<std::size_t>(j);
    lp.lower[uj] = lp.upper[uj] = std::round(x0[uj]);
  }
  SimplexEngine engine(lp);
  LpBasis basis;
  bool have_basis = false;

  std::vector<double> grad;
  double f = objective.value_and_gradient(res.x, grad);
  res.f = f;
  std::vector<double> trial(n);
  const auto& is_int = X.integer_mask();
  const auto slope_to = [&](const std::vector<double>& p) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (!is_int[j]) s += grad[j] * (res.x[j] - p[j]);
    return s;
  };

  // x is kept as the convex combination sum weight[i] * atoms[i]
  std::vector<std::vector<double>> atoms{res.x};
  std::vector<double> weight{1.0};

  for (;;) {
    engine.set_objective(grad);
    LpOutcome vertex = engine.solve(lp.lower, lp.upper, cfg.lp, have_basis ? &basis : nullptr);
    ++res.lp_solves;
    if (vertex.status != LpStatus::Optimal) {
      res.status = RefineStatus::LpFailure;
      return res;
    }
    basis = std::move(vertex.basis);
    have_basis = true;

    const double gap = slope_to(vertex.x);
    res.gap = gap;
    res.gap_history.push_back(gap);
    res.f_history.push_back(f);
    if (gap <= cfg.tolerance) {
      res.status = RefineStatus::Converged;
      return res;
    }
    if (res.iterations >= cfg.max_iterations) {
      res.status = RefineStatus::IterationLimit;
      return res;
    }

    // away step: move off the active atom with the worst slope
    std::size_t away = 0;
    double away_slope = -kInf;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const double s = -slope_to(atoms[i]);
      if (s > away_slope) {
        away_slope = s;
        away = i;
      }
    }
    const bool use_away = atoms.size() > 1 && away_slope > gap && weight[away] < 1.0;
    std::vector<double> dir(n, 0.0);
    double slope = gap, t_max = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (is_int[j]) continue;
      dir[j] = use_away ? res.x[j] - atoms[away][j] : vertex.x[j] - res.x[j];
    }
    if (use_away) {
      slope = away_slope;
      t_max = weight[away] / (1.0 - weight[away]);
    }

    const auto value_at = [&](double t) {
      for (std::size_t j = 0; j < n; ++j) trial[j] = res.x[j] + t * dir[j];
      try {
        return objective.value(trial);
      } catch (const DomainError&) {
        return kInf;
      }
    };
    // first trial at the minimizer of the quadratic through f, -slope and f(t_max)
    double t = t_max;
    double ft = value_at(t_max);
    const double curvature = (ft - f + slope * t_max) / (t_max * t_max);
    if (std::isfinite(ft) && curvature > 0.0 && slope < 2.0 * curvature * t_max) {
      t = slope / (2.0 * curvature);
      ft = value_at(t);
    }
    for (;;) {
      if (ft <= f - cfg.sufficient_decrease * t * slope) break;
      t *= cfg.backtrack;
      if (t < 1e-14) {
        res.status = RefineStatus::Stalled;
        return res;
      }
      ft = value_at(t);
    }

    if (use_away) {
      for (double& w : weight) w *= 1.0 + t;
      weight[away] -= t;
      if (t == t_max) weight[away] = 0.0;
    } else if (t == 1.0) {
      atoms.clear();
      weight.clear();
    } else {
      for (double& w : weight) w *= 1.0 - t;
    }
    if (!use_away) {
      const auto same = std::find(atoms.begin(), atoms.end(), vertex.x);
      if (same == atoms.end()) {
        atoms.push_back(vertex.x);
        weight.push_back(t);
      } else {
        weight[static_cast<std::size_t>(same - atoms.begin())] += t;
      }
    }
    for (std::size_t i = atoms.size(); i-- > 0;) {
      if (weight[i] <= 1e-15) {
        atoms.erase(atoms.begin() + static_cast<std::ptrdiff_t>(i));
        weight.erase(weight.begin() + static_cast<std::ptrdiff_t>(i));
      }
    }

    ++res.iterations;
    res.x = trial;
    f = objective.value_and_gradient(res.x, grad);
    res.f = f;
  }
}

}  // namespace smil
