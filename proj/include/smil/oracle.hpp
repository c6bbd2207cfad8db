#pragma once

// Brute-force reference solvers used to validate the simplex and
// branch-and-bound engines. Slow by design; sizes are capped.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "smil/lp.hpp"
#include "smil/milp_types.hpp"
#include "smil/model.hpp"
#include "smil/refine.hpp"

namespace smil {

namespace detail {

// Solves the dense n x n system A x = b (row-major) by Gaussian elimination
// with partial pivoting. Returns false if A is numerically singular.
inline bool dense_solve(std::vector<double> a, std::vector<double> b, std::vector<double>& x) {
  const std::size_t n = b.size();
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  const double tiny = 1e-12 * std::max(scale, 1.0);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    if (std::abs(a[piv * n + c]) <= tiny) return false;
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
      std::swap(b[c], b[piv]);
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / a[c * n + c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
      b[r] -= f * b[c];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t c = n; c-- > 0;) {
    double s = b[c];
    for (std::size_t k = c + 1; k < n; ++k) s -= a[c * n + k] * x[k];
    x[c] = s / a[c * n + c];
  }
  return true;
}

}  // namespace detail

namespace detail {

// Best basic feasible solution with infinite bounds replaced by +-box.
// `touches` reports whether the returned point sits on the artificial box.
inline LpOutcome enumerate_vertices(const LinearProgram& lp, double box, bool& touches) {
  touches = false;
  const int n = lp.num_vars();
  const int m = lp.num_rows();
  const auto un = static_cast<std::size_t>(n);

  std::vector<double> dense(static_cast<std::size_t>(m) * un, 0.0);
  for (const auto& t : lp.entries) dense[static_cast<std::size_t>(t.row) * un + static_cast<std::size_t>(t.col)] += t.value;
  std::vector<double> lo(lp.lower), hi(lp.upper);
  std::vector<bool> artificial_lo(un), artificial_hi(un);
  for (std::size_t j = 0; j < un; ++j) {
    if (!std::isfinite(lo[j])) lo[j] = -box, artificial_lo[j] = true;
    if (!std::isfinite(hi[j])) hi[j] = box, artificial_hi[j] = true;
  }

  // candidate active constraints: row i, or bound (variable j, upper?)
  struct Active {
    int row = -1;
    int var = -1;
    bool upper = false;
  };
  std::vector<Active> forced, optional;
  int equalities = 0;
  for (int i = 0; i < m; ++i) equalities += lp.senses[static_cast<std::size_t>(i)] == Sense::Equal;
  const bool force_eq = equalities <= n;
  for (int i = 0; i < m; ++i) {
    if (force_eq && lp.senses[static_cast<std::size_t>(i)] == Sense::Equal) forced.push_back({i, -1, false});
    else optional.push_back({i, -1, false});
  }
  for (int j = 0; j < n; ++j) {
    optional.push_back({-1, j, false});
    if (hi[static_cast<std::size_t>(j)] != lo[static_cast<std::size_t>(j)]) optional.push_back({-1, j, true});
  }

  LpOutcome out;
  out.status = LpStatus::Infeasible;
  double best = kInf;
  std::vector<double> x;
  std::vector<Active> chosen = forced;
  std::vector<bool> var_used(un, false);

  const auto feasible = [&](const std::vector<double>& v) {
    for (int i = 0; i < m; ++i) {
      double act = 0.0;
      for (std::size_t j = 0; j < un; ++j) act += dense[static_cast<std::size_t>(i) * un + j] * v[j];
      const double b = lp.rhs[static_cast<std::size_t>(i)];
      const double tol = 1e-9 * (1.0 + std::abs(b));
      switch (lp.senses[static_cast<std::size_t>(i)]) {
        case Sense::LessEqual: if (act > b + tol) return false; break;
        case Sense::GreaterEqual: if (act < b - tol) return false; break;
        case Sense::Equal: if (std::abs(act - b) > tol) return false; break;
      }
    }
    for (std::size_t j = 0; j < un; ++j) {
      const double tol = 1e-9 * (1.0 + std::abs(v[j]));
      if (v[j] < lo[j] - tol || v[j] > hi[j] + tol) return false;
    }
    return true;
  };

  const auto evaluate = [&] {
    ++out.iterations;
    std::vector<double> a(un * un, 0.0), b(un, 0.0);
    for (std::size_t r = 0; r < un; ++r) {
      const Active& c = chosen[r];
      if (c.row >= 0) {
        for (std::size_t j = 0; j < un; ++j) a[r * un + j] = dense[static_cast<std::size_t>(c.row) * un + j];
        b[r] = lp.rhs[static_cast<std::size_t>(c.row)];
      } else {
        const auto j = static_cast<std::size_t>(c.var);
        a[r * un + j] = 1.0;
        b[r] = c.upper ? hi[j] : lo[j];
      }
    }
    if (!detail::dense_solve(std::move(a), std::move(b), x) || !feasible(x)) return;
    double obj = lp.objective_offset;
    for (std::size_t j = 0; j < un; ++j) obj += lp.objective[j] * x[j];
    if (obj < best) {
      best = obj;
      out.x = x;
    }
  };

  const auto recurse = [&](auto&& self, std::size_t start) -> void {
    if (chosen.size() == un) {
      evaluate();
      return;
    }
    const std::size_t need = un - chosen.size();
    for (std::size_t k = start; k + need <= optional.size(); ++k) {
      const Active& c = optional[k];
      if (c.var >= 0) {
        if (var_used[static_cast<std::size_t>(c.var)]) continue;
        var_used[static_cast<std::size_t>(c.var)] = true;
      }
      chosen.push_back(c);
      self(self, k + 1);
      chosen.pop_back();
      if (c.var >= 0) var_used[static_cast<std::size_t>(c.var)] = false;
    }
  };
  if (forced.size() <= un) recurse(recurse, 0);

  if (out.x.empty()) return out;
  for (std::size_t j = 0; j < un; ++j) {
    const double tol = 1e-6 * box;
    if ((artificial_lo[j] && out.x[j] <= lo[j] + tol) || (artificial_hi[j] && out.x[j] >= hi[j] - tol)) touches = true;
  }
  out.status = LpStatus::Optimal;
  out.objective = best;
  return out;
}

}  // namespace detail

/// Exact LP optimum by enumerating every basic solution: choose n active
/// constraints among rows and variable bounds, solve, keep the best feasible
/// one. Infinite bounds are replaced by an artificial box of half-width
/// `box`. If the optimum sits on that box, the box is doubled; a strictly
/// better objective then means the LP is unbounded.
inline LpOutcome lp_basis_oracle(const LinearProgram& lp, int size_limit = 14, double box = 1e7) {
  lp.validate();
  if (lp.num_vars() + lp.num_rows() > size_limit) throw std::invalid_argument("lp_basis_oracle: instance exceeds size limit");
  bool touches = false;
  LpOutcome out = detail::enumerate_vertices(lp, box, touches);
  if (!touches) return out;
  bool again = false;
  const LpOutcome wider = detail::enumerate_vertices(lp, 2.0 * box, again);
  if (wider.objective < out.objective - 1e-9 * (1.0 + std::abs(out.objective))) {
    out.status = LpStatus::Unbounded;
    out.x.clear();
    out.objective = -kInf;
  }
  return out;
}

namespace detail {

// Calls visit(values) for every integer combination in lexicographic order
// (first integer column varies slowest).
template <class Visit>
void for_each_combination(std::span<const double> lo, std::span<const double> hi, Visit&& visit) {
  std::vector<double> cur(lo.begin(), lo.end());
  for (std::size_t k = 0; k < lo.size(); ++k)
    if (lo[k] > hi[k]) return;
  for (;;) {
    visit(std::span<const double>(cur));
    std::size_t k = cur.size();
    while (k > 0) {
      --k;
      if (cur[k] < hi[k]) {
        cur[k] += 1.0;
        for (std::size_t r = k + 1; r < cur.size(); ++r) cur[r] = lo[r];
        break;
      }
      if (k == 0) return;
    }
    if (cur.empty()) return;
  }
}

inline std::size_t combination_count(std::span<const double> lo, std::span<const double> hi, std::size_t cap) {
  std::size_t total = 1;
  for (std::size_t k = 0; k < lo.size(); ++k) {
    if (lo[k] > hi[k]) return 0;
    const auto range = static_cast<std::size_t>(hi[k] - lo[k]) + 1;
    if (total > cap / range) return cap + 1;
    total *= range;
  }
  return total;
}

inline void integer_ranges(const LinearProgram& lp, std::span<const int> ints, double int_tol, std::vector<double>& lo,
                           std::vector<double>& hi) {
  lo.clear();
  hi.clear();
  for (int j : ints) {
    // + 0.0 turns ceil(-tol) = -0 into +0
    lo.push_back(std::ceil(lp.lower[static_cast<std::size_t>(j)] - int_tol) + 0.0);
    hi.push_back(std::floor(lp.upper[static_cast<std::size_t>(j)] + int_tol) + 0.0);
  }
}

}  // namespace detail

/// Exact MILP optimum: fix every integer combination and solve the LP.
/// The lexicographically first combination wins ties.
inline MilpOutcome enumerate_milp(const Milp& p, std::size_t combo_limit = 4096, const LpOptions& lp_opt = {}) {
  p.validate();
  std::vector<double> lo, hi;
  detail::integer_ranges(p.base, p.integers, 1e-6, lo, hi);
  if (detail::combination_count(lo, hi, combo_limit) > combo_limit)
    throw std::invalid_argument("enumerate_milp: combination count exceeds limit");

  MilpOutcome out;
  out.status = MilpStatus::Infeasible;
  LinearProgram fixed = p.base;
  bool unbounded = false, failure = false;
  detail::for_each_combination(lo, hi, [&](std::span<const double> combo) {
    if (unbounded || failure) return;
    for (std::size_t k = 0; k < combo.size(); ++k) {
      const auto j = static_cast<std::size_t>(p.integers[k]);
      fixed.lower[j] = fixed.upper[j] = combo[k];
    }
    ++out.nodes;
    const LpOutcome r = solve_lp(fixed, lp_opt);
    if (r.status == LpStatus::Unbounded) unbounded = true;
    else if (r.status != LpStatus::Optimal && r.status != LpStatus::Infeasible) failure = true;
    else if (r.status == LpStatus::Optimal && r.objective < out.objective) {
      out.objective = r.objective;
      out.x = r.x;
    }
  });
  if (failure) {
    out.status = MilpStatus::SolverFailure;
  } else if (unbounded) {
    out.status = MilpStatus::Unbounded;
    out.x.clear();
    out.objective = -kInf;
  } else if (!out.x.empty()) {
    out.status = MilpStatus::Optimal;
    out.best_bound = out.objective;
  }
  return out;
}

struct ComboRow {
  std::vector<double> z;  // integer values in integer-column order
  bool feasible = false;
  double best_f = kInf;  // best refined objective over the starts
};

struct MinlpEnumeration {
  bool found = false;
  std::vector<double> x;
  double f = kInf;
  int feasible_combos = 0;
  int refine_calls = 0;
  std::vector<ComboRow> table;
};

/// Enumeration baseline: every integer combination is checked for LP
/// feasibility, then refined from `starts` random starting points (each
/// projected onto the fixed-integer polytope in the l1 norm).
inline MinlpEnumeration enumerate_minlp(const MixedIntegerPolyhedron& X, const SmoothObjective& objective,
                                        std::size_t combo_limit, int starts, const RefineConfig& cfg, std::uint64_t seed) {
  if (starts < 1) throw std::invalid_argument("enumerate_minlp: need at least one start per combination");
  X.validate();
  const auto n = static_cast<std::size_t>(X.num_vars());
  const LinearProgram base = X.as_lp({});
  std::vector<double> lo, hi;
  detail::integer_ranges(base, X.integers(), 1e-6, lo, hi);
  if (detail::combination_count(lo, hi, combo_limit) > combo_limit)
    throw std::invalid_argument("enumerate_minlp: combination count exceeds limit");

  // l1 projection LP: columns x, then d+ and d- per variable
  LinearProgram proj = base;
  proj.objective.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const int up = proj.add_variable(0.0, kInf, 1.0);
    const int down = proj.add_variable(0.0, kInf, 1.0);
    proj.add_row({{static_cast<int>(j), 1.0}, {up, -1.0}, {down, 1.0}}, Sense::Equal, 0.0);
  }
  const auto first_link = static_cast<std::size_t>(base.num_rows());

  MinlpEnumeration out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  LinearProgram feas = base;

  detail::for_each_combination(lo, hi, [&](std::span<const double> combo) {
    ComboRow row;
    row.z.assign(combo.begin(), combo.end());
    for (std::size_t k = 0; k < combo.size(); ++k) {
      const auto j = static_cast<std::size_t>(X.integers()[k]);
      feas.lower[j] = feas.upper[j] = combo[k];
      proj.lower[j] = proj.upper[j] = combo[k];
    }
    const LpOutcome check = solve_lp(feas, cfg.lp);
    row.feasible = check.status == LpStatus::Optimal;
    if (row.feasible) {
      ++out.feasible_combos;
      for (int s = 0; s < starts; ++s) {
        for (std::size_t j = 0; j < n; ++j) {
          double target = check.x[j];
          if (!X.integer_mask()[j]) {
            const double l = base.lower[j], u = base.upper[j];
            target = (std::isfinite(l) && std::isfinite(u)) ? l + (u - l) * unit(rng) : check.x[j] + 10.0 * normal(rng);
          }
          proj.rhs[first_link + j] = target;
        }
        const LpOutcome start = solve_lp(proj, cfg.lp);
        if (start.status != LpStatus::Optimal) continue;
        const std::vector<double> x0(start.x.begin(), start.x.begin() + static_cast<std::ptrdiff_t>(n));
        const RefineResult r = refine_fixed_integer(X, objective, x0, cfg);
        ++out.refine_calls;
        if (r.f < row.best_f) row.best_f = r.f;
        if (r.f < out.f) {
          out.f = r.f;
          out.x = r.x;
          out.found = true;
        }
      }
    }
    out.table.push_back(std::move(row));
  });
  return out;
}

}  // namespace smil
