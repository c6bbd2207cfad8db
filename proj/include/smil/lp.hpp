#pragma once

// Bounded-variable primal revised simplex.
//
// Every row i gets a logical variable r_i = a_i x whose bounds encode the row
// sense, so the working system is [A -I](x, r) = 0 with box constraints on all
// n + m columns. Phase 1 minimizes the sum of bound violations of the basic
// variables (composite simplex), phase 2 the true objective. The basis
// inverse is held densely and refactorized periodically.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace smil {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense : std::uint8_t { LessEqual, Equal, GreaterEqual };

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// min c'x + offset  s.t.  rows (A x) sense rhs,  lower <= x <= upper.
struct LinearProgram {
  std::vector<double> objective;
  double objective_offset = 0.0;
  std::vector<Triplet> entries;
  std::vector<Sense> senses;
  std::vector<double> rhs;
  std::vector<double> lower;
  std::vector<double> upper;

  int num_vars() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rhs.size()); }

  int add_variable(double lb, double ub, double cost = 0.0) {
    objective.push_back(cost);
    lower.push_back(lb);
    upper.push_back(ub);
    return num_vars() - 1;
  }

  int add_row(std::span<const std::pair<int, double>> terms, Sense sense, double b) {
    const int row = num_rows();
    for (const auto& [col, v] : terms) entries.push_back({row, col, v});
    senses.push_back(sense);
    rhs.push_back(b);
    return row;
  }
  int add_row(std::initializer_list<std::pair<int, double>> terms, Sense sense, double b) {
    return add_row(std::span<const std::pair<int, double>>(terms.begin(), terms.size()), sense, b);
  }

  /// Throws std::invalid_argument on inconsistent dimensions or bounds.
  void validate() const {
    const auto n = objective.size();
    if (lower.size() != n || upper.size() != n) throw std::invalid_argument("bound vectors do not match objective size");
    if (senses.size() != rhs.size()) throw std::invalid_argument("senses and rhs differ in length");
    for (const auto& t : entries) {
      if (t.row < 0 || t.row >= num_rows() || t.col < 0 || t.col >= num_vars())
        throw std::invalid_argument("triplet (" + std::to_string(t.row) + ", " + std::to_string(t.col) + ") out of range");
      if (!std::isfinite(t.value)) throw std::invalid_argument("non-finite matrix entry");
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j] || lower[j] == kInf || upper[j] == -kInf)
        throw std::invalid_argument("invalid bounds on variable " + std::to_string(j));
    }
    for (double b : rhs)
      if (!std::isfinite(b)) throw std::invalid_argument("non-finite right-hand side");
  }

  /// Activity a_i x for every row.
  std::vector<double> row_activity(std::span<const double> x) const {
    std::vector<double> act(rhs.size(), 0.0);
    for (const auto& t : entries) act[static_cast<std::size_t>(t.row)] += t.value * x[static_cast<std::size_t>(t.col)];
    return act;
  }

  double objective_value(std::span<const double> x) const {
    double v = objective_offset;
    for (std::size_t j = 0; j < objective.size(); ++j) v += objective[j] * x[j];
    return v;
  }
};

enum class LpStatus : std::uint8_t { Optimal, Infeasible, Unbounded, IterationLimit, NumericalFailure };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration_limit";
    case LpStatus::NumericalFailure: return "numerical_failure";
  }
  return "?";
}

/// Final basis of a solve; feeding it back warm-starts a solve of the same
/// matrix with different bounds.
struct LpBasis {
  std::vector<int> basic;             // m column indices in [0, n + m)
  std::vector<std::uint8_t> at_upper; // n + m flags for nonbasic columns
  std::shared_ptr<const std::vector<double>> inverse;  // optional, column-major m x m
  int updates_since_refactor = 0;
};

struct LpOutcome {
  LpStatus status = LpStatus::NumericalFailure;
  std::vector<double> x;  // present iff Optimal
  double objective = 0.0;
  int iterations = 0;
  LpBasis basis;
};

struct LpOptions {
  double feas_tol = 1e-9;
  double opt_tol = 1e-9;
  int iteration_limit = 0;  // 0: automatic, scaled with problem size
  int degenerate_streak = 50;
  int refactor_interval = 100;
};

/// Reusable solver for one constraint matrix; bounds vary per solve.
class SimplexEngine {
 public:
  explicit SimplexEngine(const LinearProgram& lp) : n_(lp.num_vars()), m_(lp.num_rows()) {
    lp.validate();
    // assemble CSC, summing duplicate (row, col) entries and dropping zeros
    std::vector<Triplet> t = lp.entries;
    std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
      return a.col != b.col ? a.col < b.col : a.row < b.row;
    });
    col_start_.assign(static_cast<std::size_t>(n_) + 1, 0);
    for (std::size_t k = 0; k < t.size();) {
      std::size_t e = k;
      double v = 0.0;
      while (e < t.size() && t[e].col == t[k].col && t[e].row == t[k].row) v += t[e++].value;
      if (v != 0.0) {
        row_idx_.push_back(t[k].row);
        val_.push_back(v);
        ++col_start_[static_cast<std::size_t>(t[k].col) + 1];
      }
      k = e;
    }
    for (int j = 0; j < n_; ++j) col_start_[static_cast<std::size_t>(j) + 1] += col_start_[static_cast<std::size_t>(j)];
    cost_.assign(static_cast<std::size_t>(n_ + m_), 0.0);
    std::copy(lp.objective.begin(), lp.objective.end(), cost_.begin());
    offset_ = lp.objective_offset;
    row_lo_.resize(static_cast<std::size_t>(m_));
    row_hi_.resize(static_cast<std::size_t>(m_));
    for (int i = 0; i < m_; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      row_lo_[ui] = lp.senses[ui] == Sense::LessEqual ? -kInf : lp.rhs[ui];
      row_hi_[ui] = lp.senses[ui] == Sense::GreaterEqual ? kInf : lp.rhs[ui];
    }
  }

  int num_vars() const { return n_; }
  int num_rows() const { return m_; }

  void set_objective(std::span<const double> cost, double offset = 0.0) {
    if (cost.size() != static_cast<std::size_t>(n_)) throw std::invalid_argument("cost vector does not match LP size");
    std::copy(cost.begin(), cost.end(), cost_.begin());
    offset_ = offset;
  }

  LpOutcome solve(std::span<const double> lower, std::span<const double> upper, const LpOptions& opt = {},
                  const LpBasis* warm = nullptr) {
    if (lower.size() != static_cast<std::size_t>(n_) || upper.size() != static_cast<std::size_t>(n_))
      throw std::invalid_argument("bound vectors do not match LP size");
    opt_ = opt;
    if (opt_.iteration_limit <= 0) opt_.iteration_limit = std::max(10000, 50 * (n_ + m_));
    const auto N = static_cast<std::size_t>(n_ + m_);
    lb_.resize(N);
    ub_.resize(N);
    for (int j = 0; j < n_; ++j) {
      lb_[static_cast<std::size_t>(j)] = lower[static_cast<std::size_t>(j)];
      ub_[static_cast<std::size_t>(j)] = upper[static_cast<std::size_t>(j)];
    }
    std::copy(row_lo_.begin(), row_lo_.end(), lb_.begin() + n_);
    std::copy(row_hi_.begin(), row_hi_.end(), ub_.begin() + n_);
    for (std::size_t j = 0; j < N; ++j)
      if (lb_[j] > ub_[j]) return finish(LpStatus::Infeasible);

    iterations_ = 0;
    bool started = false;
    if (warm != nullptr && warm->basic.size() == static_cast<std::size_t>(m_) && warm->at_upper.size() == N)
      started = start_from(*warm);
    if (!started) cold_start();
    return run();
  }

 private:
  enum : std::uint8_t { kAtLower = 0, kAtUpper = 1, kFree = 2 };

  void cold_start() {
    const auto N = static_cast<std::size_t>(n_ + m_);
    x_.assign(N, 0.0);
    state_.assign(N, kAtLower);
    head_.resize(static_cast<std::size_t>(m_));
    pos_.assign(N, -1);
    for (int i = 0; i < m_; ++i) {
      head_[static_cast<std::size_t>(i)] = n_ + i;
      pos_[static_cast<std::size_t>(n_ + i)] = i;
    }
    for (int j = 0; j < n_; ++j) place_nonbasic(static_cast<std::size_t>(j), false);
    const auto M = static_cast<std::size_t>(m_);
    binv_.assign(M * M, 0.0);
    for (std::size_t i = 0; i < M; ++i) binv_[i + i * M] = -1.0;
    since_refactor_ = 0;
    recompute_basics();
  }

  bool start_from(const LpBasis& warm) {
    const auto N = static_cast<std::size_t>(n_ + m_);
    head_ = warm.basic;
    pos_.assign(N, -1);
    for (std::size_t i = 0; i < head_.size(); ++i) {
      const int j = head_[i];
      if (j < 0 || j >= n_ + m_ || pos_[static_cast<std::size_t>(j)] != -1) return false;
      pos_[static_cast<std::size_t>(j)] = static_cast<int>(i);
    }
    x_.assign(N, 0.0);
    state_.assign(N, kAtLower);
    for (std::size_t j = 0; j < N; ++j)
      if (pos_[j] < 0) place_nonbasic(j, warm.at_upper[j] != 0);
    const auto M = static_cast<std::size_t>(m_);
    if (warm.inverse && warm.inverse->size() == M * M && warm.updates_since_refactor < opt_.refactor_interval) {
      binv_ = *warm.inverse;
      since_refactor_ = warm.updates_since_refactor;
    } else if (!refactor()) {
      return false;
    }
    recompute_basics();
    return true;
  }

  void place_nonbasic(std::size_t j, bool prefer_upper) {
    const bool has_lo = std::isfinite(lb_[j]);
    const bool has_hi = std::isfinite(ub_[j]);
    if (has_lo && has_hi) {
      state_[j] = prefer_upper ? kAtUpper : kAtLower;
      x_[j] = prefer_upper ? ub_[j] : lb_[j];
    } else if (has_lo) {
      state_[j] = kAtLower;
      x_[j] = lb_[j];
    } else if (has_hi) {
      state_[j] = kAtUpper;
      x_[j] = ub_[j];
    } else {
      state_[j] = kFree;
      x_[j] = 0.0;
    }
  }

  // alpha = B^{-1} a_j
  void ftran(int j, std::vector<double>& alpha) const {
    const auto M = static_cast<std::size_t>(m_);
    alpha.assign(M, 0.0);
    const auto add_col = [&](std::size_t r, double v) {
      const double* col = &binv_[r * M];
      for (std::size_t i = 0; i < M; ++i) alpha[i] += v * col[i];
    };
    if (j < n_) {
      for (int k = col_start_[static_cast<std::size_t>(j)]; k < col_start_[static_cast<std::size_t>(j) + 1]; ++k)
        add_col(static_cast<std::size_t>(row_idx_[static_cast<std::size_t>(k)]), val_[static_cast<std::size_t>(k)]);
    } else {
      add_col(static_cast<std::size_t>(j - n_), -1.0);
    }
  }

  // y' = cb' B^{-1}
  void btran(const std::vector<double>& cb, std::vector<double>& y) const {
    const auto M = static_cast<std::size_t>(m_);
    y.assign(M, 0.0);
    for (std::size_t r = 0; r < M; ++r) {
      const double* col = &binv_[r * M];
      double s = 0.0;
      for (std::size_t i = 0; i < M; ++i) s += cb[i] * col[i];
      y[r] = s;
    }
  }

  double dot_column(int j, const std::vector<double>& y) const {
    if (j >= n_) return -y[static_cast<std::size_t>(j - n_)];
    double s = 0.0;
    for (int k = col_start_[static_cast<std::size_t>(j)]; k < col_start_[static_cast<std::size_t>(j) + 1]; ++k)
      s += val_[static_cast<std::size_t>(k)] * y[static_cast<std::size_t>(row_idx_[static_cast<std::size_t>(k)])];
    return s;
  }

  void recompute_basics() {
    const auto M = static_cast<std::size_t>(m_);
    std::vector<double> r(M, 0.0);
    for (int j = 0; j < n_ + m_; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      if (pos_[uj] >= 0 || x_[uj] == 0.0) continue;
      if (j < n_) {
        for (int k = col_start_[uj]; k < col_start_[uj + 1]; ++k)
          r[static_cast<std::size_t>(row_idx_[static_cast<std::size_t>(k)])] -= val_[static_cast<std::size_t>(k)] * x_[uj];
      } else {
        r[static_cast<std::size_t>(j - n_)] += x_[uj];
      }
    }
    for (std::size_t i = 0; i < M; ++i) x_[static_cast<std::size_t>(head_[i])] = 0.0;
    for (std::size_t c = 0; c < M; ++c) {
      if (r[c] == 0.0) continue;
      const double* col = &binv_[c * M];
      for (std::size_t i = 0; i < M; ++i) x_[static_cast<std::size_t>(head_[i])] += col[i] * r[c];
    }
  }

  // max |a_i x - r_i| over rows; drift of the product-form updates shows up here
  double row_residual() const {
    std::vector<double> act(static_cast<std::size_t>(m_), 0.0);
    for (int j = 0; j < n_; ++j) {
      const double xj = x_[static_cast<std::size_t>(j)];
      if (xj == 0.0) continue;
      for (int k = col_start_[static_cast<std::size_t>(j)]; k < col_start_[static_cast<std::size_t>(j) + 1]; ++k)
        act[static_cast<std::size_t>(row_idx_[static_cast<std::size_t>(k)])] += val_[static_cast<std::size_t>(k)] * xj;
    }
    double worst = 0.0;
    for (int i = 0; i < m_; ++i)
      worst = std::max(worst, std::abs(act[static_cast<std::size_t>(i)] - x_[static_cast<std::size_t>(n_ + i)]));
    return worst;
  }

  // Gauss-Jordan inversion of the current basis matrix with partial pivoting.
  bool refactor() {
    const auto M = static_cast<std::size_t>(m_);
    std::vector<double> a(M * M, 0.0);  // column-major B
    for (std::size_t c = 0; c < M; ++c) {
      const int j = head_[c];
      if (j < n_) {
        for (int k = col_start_[static_cast<std::size_t>(j)]; k < col_start_[static_cast<std::size_t>(j) + 1]; ++k)
          a[static_cast<std::size_t>(row_idx_[static_cast<std::size_t>(k)]) + c * M] = val_[static_cast<std::size_t>(k)];
      } else {
        a[static_cast<std::size_t>(j - n_) + c * M] = -1.0;
      }
    }
    std::vector<double> inv(M * M, 0.0);
    for (std::size_t i = 0; i < M; ++i) inv[i + i * M] = 1.0;
    // Row operations on [B | I]; rows are strided in column-major storage.
    for (std::size_t c = 0; c < M; ++c) {
      std::size_t piv = c;
      double best = std::abs(a[c + c * M]);
      for (std::size_t i = c + 1; i < M; ++i) {
        if (std::abs(a[i + c * M]) > best) {
          best = std::abs(a[i + c * M]);
          piv = i;
        }
      }
      if (best < 1e-11) return false;
      if (piv != c) {
        for (std::size_t k = 0; k < M; ++k) {
          std::swap(a[c + k * M], a[piv + k * M]);
          std::swap(inv[c + k * M], inv[piv + k * M]);
        }
      }
      const double d = a[c + c * M];
      for (std::size_t k = 0; k < M; ++k) {
        a[c + k * M] /= d;
        inv[c + k * M] /= d;
      }
      for (std::size_t k = 0; k < M; ++k) {
        const double pa = a[c + k * M];
        const double pi = inv[c + k * M];
        if (pa == 0.0 && pi == 0.0) continue;
        double* acol = &a[k * M];
        double* icol = &inv[k * M];
        for (std::size_t i = 0; i < M; ++i) {
          if (i == c) continue;
          const double f = a[i + c * M];
          if (f == 0.0) continue;
          if (k != c) acol[i] -= f * pa;
          icol[i] -= f * pi;
        }
      }
      for (std::size_t i = 0; i < M; ++i)
        if (i != c) a[i + c * M] = 0.0;
    }
    // inv now holds B^{-1} with rows indexed by basis position
    binv_ = std::move(inv);
    since_refactor_ = 0;
    return true;
  }

  void pivot(std::size_t p, const std::vector<double>& alpha) {
    const auto M = static_cast<std::size_t>(m_);
    const double ap = alpha[p];
    for (std::size_t c = 0; c < M; ++c) {
      double* col = &binv_[c * M];
      const double v = col[p] / ap;
      if (v != 0.0) {
        for (std::size_t i = 0; i < M; ++i) col[i] -= alpha[i] * v;
      }
      col[p] = v;
    }
    ++since_refactor_;
  }

  LpOutcome run() {
    const auto M = static_cast<std::size_t>(m_);
    const auto N = static_cast<std::size_t>(n_ + m_);
    const double ftol = opt_.feas_tol;
    std::vector<double> cb(M), y, alpha;
    int degenerate = 0;
    bool fresh = false;  // factorization recomputed since the last pivot
    int no_ratio_retries = 0;

    for (;;) {
      if (iterations_ >= opt_.iteration_limit) return finish(LpStatus::IterationLimit);
      if (since_refactor_ >= opt_.refactor_interval) {
        if (!refactor()) return finish(LpStatus::NumericalFailure);
        recompute_basics();
        fresh = true;
      }

      bool phase1 = false;
      for (std::size_t i = 0; i < M; ++i) {
        const auto j = static_cast<std::size_t>(head_[i]);
        if (x_[j] < lb_[j] - ftol) {
          cb[i] = -1.0;
          phase1 = true;
        } else if (x_[j] > ub_[j] + ftol) {
          cb[i] = 1.0;
          phase1 = true;
        } else {
          cb[i] = 0.0;
        }
      }
      if (!phase1)
        for (std::size_t i = 0; i < M; ++i) cb[i] = cost_[static_cast<std::size_t>(head_[i])];
      btran(cb, y);

      // pricing
      const bool bland = degenerate >= opt_.degenerate_streak;
      int enter = -1;
      double best = 0.0;
      double enter_d = 0.0;
      for (std::size_t j = 0; j < N; ++j) {
        if (pos_[j] >= 0 || lb_[j] == ub_[j]) continue;
        const double cj = phase1 ? 0.0 : cost_[j];
        const double d = cj - dot_column(static_cast<int>(j), y);
        bool eligible = false;
        switch (state_[j]) {
          case kAtLower: eligible = d < -opt_.opt_tol; break;
          case kAtUpper: eligible = d > opt_.opt_tol; break;
          default: eligible = std::abs(d) > opt_.opt_tol; break;
        }
        if (!eligible) continue;
        if (bland) {
          enter = static_cast<int>(j);
          enter_d = d;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          enter = static_cast<int>(j);
          enter_d = d;
        }
      }

      if (enter < 0) {
        if (!fresh && row_residual() > ftol) {
          if (!refactor()) return finish(LpStatus::NumericalFailure);
          recompute_basics();
          fresh = true;
          continue;
        }
        return finish(phase1 ? LpStatus::Infeasible : LpStatus::Optimal);
      }

      ftran(enter, alpha);
      const double dir = enter_d < 0 ? 1.0 : -1.0;

      // Harris two-pass ratio test
      const double piv_tol = 1e-9;
      double theta_max = kInf;
      for (std::size_t i = 0; i < M; ++i) {
        if (std::abs(alpha[i]) <= piv_tol) continue;
        const auto j = static_cast<std::size_t>(head_[i]);
        const double rate = -dir * alpha[i];
        const double v = x_[j];
        double t = kInf;
        if (v < lb_[j] - ftol) {
          if (rate > 0) t = (lb_[j] - v + ftol) / rate;
        } else if (v > ub_[j] + ftol) {
          if (rate < 0) t = (v - ub_[j] + ftol) / -rate;
        } else if (rate < 0) {
          if (std::isfinite(lb_[j])) t = (v - lb_[j] + ftol) / -rate;
        } else {
          if (std::isfinite(ub_[j])) t = (ub_[j] - v + ftol) / rate;
        }
        theta_max = std::min(theta_max, t);
      }
      const auto ue = static_cast<std::size_t>(enter);
      const double flip_len = (std::isfinite(lb_[ue]) && std::isfinite(ub_[ue])) ? ub_[ue] - lb_[ue] : kInf;

      int leave = -1;
      double theta = kInf;
      double leave_value = 0.0;
      if (std::isfinite(theta_max)) {
        double best_alpha = 0.0;
        for (std::size_t i = 0; i < M; ++i) {
          if (std::abs(alpha[i]) <= piv_tol) continue;
          const auto j = static_cast<std::size_t>(head_[i]);
          const double rate = -dir * alpha[i];
          const double v = x_[j];
          double t = kInf;
          double target = 0.0;
          if (v < lb_[j] - ftol) {
            if (rate > 0) { t = (lb_[j] - v) / rate; target = lb_[j]; }
          } else if (v > ub_[j] + ftol) {
            if (rate < 0) { t = (v - ub_[j]) / -rate; target = ub_[j]; }
          } else if (rate < 0) {
            if (std::isfinite(lb_[j])) { t = (v - lb_[j]) / -rate; target = lb_[j]; }
          } else {
            if (std::isfinite(ub_[j])) { t = (ub_[j] - v) / rate; target = ub_[j]; }
          }
          if (t > theta_max) continue;
          const bool better = bland ? (leave < 0 || head_[i] < head_[static_cast<std::size_t>(leave)])
                                    : std::abs(alpha[i]) > best_alpha;
          if (better) {
            best_alpha = std::abs(alpha[i]);
            leave = static_cast<int>(i);
            theta = std::max(t, 0.0);
            leave_value = target;
          }
        }
      }

      if (std::isfinite(flip_len) && (leave < 0 || flip_len <= theta)) {
        // bound flip of the entering column, no basis change
        const double step = flip_len;
        x_[ue] = state_[ue] == kAtLower ? ub_[ue] : lb_[ue];
        state_[ue] = state_[ue] == kAtLower ? kAtUpper : kAtLower;
        for (std::size_t i = 0; i < M; ++i)
          if (alpha[i] != 0.0) x_[static_cast<std::size_t>(head_[i])] -= dir * step * alpha[i];
        ++iterations_;
        degenerate = step <= 1e-12 ? degenerate + 1 : 0;
        fresh = false;
        continue;
      }
      if (leave < 0) {
        if (!fresh || no_ratio_retries < 1) {
          if (!refactor()) return finish(LpStatus::NumericalFailure);
          recompute_basics();
          fresh = true;
          ++no_ratio_retries;
          continue;
        }
        return finish(phase1 ? LpStatus::NumericalFailure : LpStatus::Unbounded);
      }

      const auto p = static_cast<std::size_t>(leave);
      const auto out = static_cast<std::size_t>(head_[p]);
      x_[ue] += dir * theta;
      for (std::size_t i = 0; i < M; ++i)
        if (alpha[i] != 0.0) x_[static_cast<std::size_t>(head_[i])] -= dir * theta * alpha[i];
      x_[out] = leave_value;
      state_[out] = (leave_value == ub_[out] && leave_value != lb_[out]) ? kAtUpper : kAtLower;
      if (!std::isfinite(lb_[out]) && !std::isfinite(ub_[out])) state_[out] = kFree;
      pos_[out] = -1;
      pos_[ue] = static_cast<int>(p);
      head_[p] = enter;
      pivot(p, alpha);
      ++iterations_;
      degenerate = theta <= 1e-12 ? degenerate + 1 : 0;
      fresh = false;
    }
  }

  LpOutcome finish(LpStatus status) {
    LpOutcome out;
    out.status = status;
    out.iterations = iterations_;
    if (status == LpStatus::Optimal) {
      out.x.assign(x_.begin(), x_.begin() + n_);
      double obj = offset_;
      for (int j = 0; j < n_; ++j) obj += cost_[static_cast<std::size_t>(j)] * out.x[static_cast<std::size_t>(j)];
      out.objective = obj;
    }
    if (!head_.empty() || m_ == 0) {
      out.basis.basic = head_;
      out.basis.at_upper.resize(state_.size());
      for (std::size_t j = 0; j < state_.size(); ++j) out.basis.at_upper[j] = state_[j] == kAtUpper ? 1 : 0;
      if (status == LpStatus::Optimal && binv_.size() == static_cast<std::size_t>(m_) * static_cast<std::size_t>(m_)) {
        out.basis.inverse = std::make_shared<const std::vector<double>>(binv_);
        out.basis.updates_since_refactor = since_refactor_;
      }
    }
    return out;
  }

  int n_;
  int m_;
  std::vector<int> col_start_;
  std::vector<int> row_idx_;
  std::vector<double> val_;
  std::vector<double> cost_;
  double offset_ = 0.0;
  std::vector<double> row_lo_, row_hi_;

  LpOptions opt_;
  std::vector<double> lb_, ub_, x_;
  std::vector<std::uint8_t> state_;
  std::vector<int> head_;
  std::vector<int> pos_;
  std::vector<double> binv_;
  int since_refactor_ = 0;
  int iterations_ = 0;
};

inline LpOutcome solve_lp(const LinearProgram& lp, const LpOptions& options = {}) {
  SimplexEngine engine(lp);
  return engine.solve(lp.lower, lp.upper, options);
}

inline LpOutcome solve_lp(const LinearProgram& lp, double feas_tol, double opt_tol) {
  LpOptions o;
  o.feas_tol = feas_tol;
  o.opt_tol = opt_tol;
  return solve_lp(lp, o);
}

}  // namespace smil
