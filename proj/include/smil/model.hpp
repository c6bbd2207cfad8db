#pragma once

// Problem data: the mixed-integer polyhedron, objectives split into a smooth
// real part and a linear integer part, partial-localization seminorms,
// feasibility reports and linear encodings of logical constraints.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "smil/expr.hpp"
#include "smil/lp.hpp"
#include "smil/milp_types.hpp"

namespace smil {

using Terms = std::vector<std::pair<int, double>>;

struct LinearConstraint {
  Terms terms;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
};

/// Feasible set {x : rows, bounds, x_i integer for i in integers}.
class MixedIntegerPolyhedron {
 public:
  int num_vars() const { return static_cast<int>(lower_.size()); }
  int num_rows() const { return static_cast<int>(rhs_.size()); }

  int add_variable(double lb, double ub, bool integer = false, std::string name = {}) {
    const int j = num_vars();
    if (name.empty()) name = "x" + std::to_string(j + 1);
    lower_.push_back(lb);
    upper_.push_back(ub);
    integer_.push_back(integer);
    names_.push_back(std::move(name));
    if (integer) integers_.push_back(j);
    return j;
  }

  int add_row(const Terms& terms, Sense sense, double rhs) {
    const int row = num_rows();
    for (const auto& [col, v] : terms) entries_.push_back({row, col, v});
    senses_.push_back(sense);
    rhs_.push_back(rhs);
    return row;
  }
  int add_constraint(const LinearConstraint& c) { return add_row(c.terms, c.sense, c.rhs); }

  void set_bounds(int j, double lb, double ub) {
    lower_[static_cast<std::size_t>(j)] = lb;
    upper_[static_cast<std::size_t>(j)] = ub;
  }

  const std::vector<Triplet>& entries() const { return entries_; }
  const std::vector<Sense>& senses() const { return senses_; }
  const std::vector<double>& rhs() const { return rhs_; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  const std::vector<int>& integers() const { return integers_; }
  const std::vector<std::string>& names() const { return names_; }
  bool is_integer(int j) const { return integer_[static_cast<std::size_t>(j)]; }
  const std::vector<bool>& integer_mask() const { return integer_; }

  /// Integer variables need finite bounds.
  void validate() const { as_milp({}).validate(); }

  /// Copy as an LP over the same columns with the given costs (zero if empty).
  LinearProgram as_lp(std::span<const double> cost) const {
    LinearProgram lp;
    lp.objective.assign(lower_.size(), 0.0);
    if (!cost.empty()) std::copy(cost.begin(), cost.end(), lp.objective.begin());
    lp.entries = entries_;
    lp.senses = senses_;
    lp.rhs = rhs_;
    lp.lower = lower_;
    lp.upper = upper_;
    return lp;
  }

  Milp as_milp(std::span<const double> cost) const { return Milp{as_lp(cost), integers_}; }

 private:
  std::vector<Triplet> entries_;
  std::vector<Sense> senses_;
  std::vector<double> rhs_;
  std::vector<double> lower_, upper_;
  std::vector<bool> integer_;
  std::vector<int> integers_;
  std::vector<std::string> names_;
};

/// f(x) = f1(u) + <f2, z> where u are the real and z the integer entries.
/// f1 sees the full vector but must not depend on integer entries; its
/// gradient is masked there, so the integer block of the gradient is f2.
class SmoothObjective {
 public:
  /// Value of f1; fills `grad` (full length) when non-null.
  using Function = std::function<double(std::span<const double>, std::vector<double>*)>;

  SmoothObjective() = default;

  SmoothObjective(int num_vars, std::vector<int> integers, std::vector<double> f2, Function f1)
      : n_(num_vars), integers_(std::move(integers)), f2_(std::move(f2)), f1_(std::move(f1)) {
    if (f2_.empty()) f2_.assign(integers_.size(), 0.0);
    if (f2_.size() != integers_.size()) throw std::invalid_argument("f2 length must equal the number of integer variables");
    for (int j : integers_)
      if (j < 0 || j >= n_) throw std::invalid_argument("integer index out of range");
  }

  /// f1 given as an expression over x1..xn (1-based, global numbering).
  static SmoothObjective from_expression(const MixedIntegerPolyhedron& X, Expression f1, std::vector<double> f2 = {}) {
    for (int v : f1.variables()) {
      if (v > X.num_vars()) throw std::invalid_argument("objective references x" + std::to_string(v) + " beyond the variable count");
      if (X.is_integer(v - 1)) throw std::invalid_argument("objective f1 references integer variable x" + std::to_string(v));
    }
    Expression captured = f1;
    SmoothObjective obj(X.num_vars(), X.integers(), std::move(f2),
                        [captured](std::span<const double> x, std::vector<double>* grad) {
                          if (grad == nullptr) return eval(captured, x);
                          return eval_with_gradient(captured, x, *grad);
                        });
    obj.expression_ = std::move(f1);
    return obj;
  }

  int num_vars() const { return n_; }
  const std::vector<int>& integers() const { return integers_; }
  const std::vector<double>& f2() const { return f2_; }
  const std::optional<Expression>& expression() const { return expression_; }

  double value(std::span<const double> x) const {
    double v = f1_(x, nullptr);
    for (std::size_t k = 0; k < integers_.size(); ++k) v += f2_[k] * x[static_cast<std::size_t>(integers_[k])];
    return v;
  }

  double value_and_gradient(std::span<const double> x, std::vector<double>& grad) const {
    grad.assign(static_cast<std::size_t>(n_), 0.0);
    double v = f1_(x, &grad);
    grad.resize(static_cast<std::size_t>(n_), 0.0);
    for (std::size_t k = 0; k < integers_.size(); ++k) {
      const auto j = static_cast<std::size_t>(integers_[k]);
      grad[j] = f2_[k];
      v += f2_[k] * x[j];
    }
    return v;
  }

  std::vector<double> gradient(std::span<const double> x) const {
    std::vector<double> g;
    value_and_gradient(x, g);
    return g;
  }

 private:
  int n_ = 0;
  std::vector<int> integers_;
  std::vector<double> f2_;
  Function f1_;
  std::optional<Expression> expression_;
};

enum class NormKind : std::uint8_t { L1, LInf };

/// Norm applied to the real-valued entries only (a seminorm when integers exist).
struct PlNorm {
  NormKind kind = NormKind::LInf;
  std::vector<bool> integer;  // per-variable mask

  PlNorm() = default;
  PlNorm(NormKind k, std::vector<bool> mask) : kind(k), integer(std::move(mask)) {}
  PlNorm(NormKind k, const MixedIntegerPolyhedron& X) : kind(k), integer(X.integer_mask()) {}
};

inline double pl_norm(const PlNorm& norm, std::span<const double> x) {
  if (x.size() != norm.integer.size()) throw std::invalid_argument("pl_norm: dimension mismatch");
  double r = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (norm.integer[i]) continue;
    r = norm.kind == NormKind::L1 ? r + std::abs(x[i]) : std::max(r, std::abs(x[i]));
  }
  return r;
}

/// Plain l1 / l-infinity norm over all entries.
inline double full_norm(NormKind kind, std::span<const double> x) {
  double r = 0.0;
  for (double v : x) r = kind == NormKind::L1 ? r + std::abs(v) : std::max(r, std::abs(v));
  return r;
}

struct FeasibilityReport {
  double max_row_violation = 0.0;
  double max_bound_violation = 0.0;
  double max_integrality_violation = 0.0;
  bool feasible = true;
};

inline FeasibilityReport check_feasible(const MixedIntegerPolyhedron& X, std::span<const double> x, double feas_tol = 1e-8,
                                        double int_tol = 1e-6) {
  if (x.size() != static_cast<std::size_t>(X.num_vars())) throw std::invalid_argument("check_feasible: dimension mismatch");
  FeasibilityReport rep;
  std::vector<double> act(static_cast<std::size_t>(X.num_rows()), 0.0);
  for (const auto& t : X.entries()) act[static_cast<std::size_t>(t.row)] += t.value * x[static_cast<std::size_t>(t.col)];
  for (std::size_t i = 0; i < act.size(); ++i) {
    const double b = X.rhs()[i];
    double viol = 0.0;
    switch (X.senses()[i]) {
      case Sense::LessEqual: viol = act[i] - b; break;
      case Sense::GreaterEqual: viol = b - act[i]; break;
      case Sense::Equal: viol = std::abs(act[i] - b); break;
    }
    rep.max_row_violation = std::max(rep.max_row_violation, viol);
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    rep.max_bound_violation = std::max({rep.max_bound_violation, X.lower()[j] - x[j], x[j] - X.upper()[j]});
    if (X.integer_mask()[j]) rep.max_integrality_violation = std::max(rep.max_integrality_violation, std::abs(x[j] - std::round(x[j])));
  }
  rep.feasible = rep.max_row_violation <= feas_tol && rep.max_bound_violation <= feas_tol &&
                 rep.max_integrality_violation <= int_tol && std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
  return rep;
}

/// Clause OR(z_i for i in positives, NOT z_j for j in negatives) over binaries as
/// sum z_pos - sum z_neg >= 1 - |negatives|.
inline LinearConstraint encode_clause(std::span<const int> positives, std::span<const int> negatives) {
  if (positives.empty() && negatives.empty()) throw std::invalid_argument("empty clause");
  LinearConstraint c;
  c.sense = Sense::GreaterEqual;
  for (int i : positives) c.terms.emplace_back(i, 1.0);
  for (int j : negatives) c.terms.emplace_back(j, -1.0);
  c.rhs = 1.0 - static_cast<double>(negatives.size());
  return c;
}

inline LinearConstraint encode_xor(int a, int b) { return {{{a, 1.0}, {b, 1.0}}, Sense::Equal, 1.0}; }

/// Affine form sum(terms) + constant.
struct LinearExpr {
  Terms terms;
  double constant = 0.0;
};

/// Forces expr = 0 when the guard literal holds:
///   expr <= M s  and  expr >= -M s,  with s = z_guard (polarity false) or
///   s = 1 - z_guard (polarity true).
inline std::array<LinearConstraint, 2> encode_bigm_equality(int guard, bool polarity, const LinearExpr& expr, double M) {
  if (!(M > 0.0)) throw std::invalid_argument("big-M constant must be positive");
  LinearConstraint upper{expr.terms, Sense::LessEqual, -expr.constant};
  LinearConstraint lower{expr.terms, Sense::GreaterEqual, -expr.constant};
  if (!polarity) {
    upper.terms.emplace_back(guard, -M);
    lower.terms.emplace_back(guard, M);
  } else {
    upper.terms.emplace_back(guard, M);
    upper.rhs += M;
    lower.terms.emplace_back(guard, -M);
    lower.rhs -= M;
  }
  return {upper, lower};
}

/// Implication z_guard => phi(u) <= 0 through an auxiliary real w:
/// returns the row w <= M (1 - z_guard); pair it with penalty_term().
inline LinearConstraint encode_penalized_implication(int guard, int aux, double M) {
  if (!(M > 0.0)) throw std::invalid_argument("big-M constant must be positive");
  return {{{aux, 1.0}, {guard, M}}, Sense::LessEqual, M};
}

/// Objective text lambda * (phi - x_aux)^2 for encode_penalized_implication.
inline std::string penalty_term(const std::string& phi, int aux, double lambda) {
  return detail::format_number(lambda) + "*((" + phi + ") - x" + std::to_string(aux + 1) + ")^2";
}

}  // namespace smil
