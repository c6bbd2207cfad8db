#pragma once

// Best-bound branch and bound over the simplex engine. Children inherit the
// parent's final basis as a warm start.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "smil/lp.hpp"
#include "smil/milp_types.hpp"

namespace smil {

struct MilpOptions {
  double int_tol = 1e-6;
  double gap_abs = 1e-8;
  double gap_rel = 1e-8;
  int node_limit = 200000;
  LpOptions lp;
  bool record_nodes = false;
};

namespace detail {

struct BbNode {
  int id = 0;
  int parent = -1;
  int depth = 0;
  double bound = -kInf;
  std::vector<double> lower, upper;  // bounds of the integer columns only
  std::shared_ptr<const LpBasis> basis;
};

struct BbNodeOrder {
  // max-heap order: lowest bound first, then deepest, then newest
  bool operator()(const std::unique_ptr<BbNode>& a, const std::unique_ptr<BbNode>& b) const {
    if (a->bound != b->bound) return a->bound > b->bound;
    if (a->depth != b->depth) return a->depth < b->depth;
    return a->id < b->id;
  }
};

}  // namespace detail

inline MilpOutcome solve_milp(const Milp& p, const MilpOptions& opt = {}) {
  p.validate();
  MilpOutcome out;
  SimplexEngine engine(p.base);
  const auto& ints = p.integers;
  const std::size_t ni = ints.size();

  std::vector<double> lower = p.base.lower;
  std::vector<double> upper = p.base.upper;

  auto root = std::make_unique<detail::BbNode>();
  root->lower.resize(ni);
  root->upper.resize(ni);
  for (std::size_t k = 0; k < ni; ++k) {
    const auto j = static_cast<std::size_t>(ints[k]);
    root->lower[k] = std::ceil(p.base.lower[j] - opt.int_tol);
    root->upper[k] = std::floor(p.base.upper[j] + opt.int_tol);
  }

  std::vector<std::unique_ptr<detail::BbNode>> open;
  const detail::BbNodeOrder order;
  const auto push = [&](std::unique_ptr<detail::BbNode> node) {
    open.push_back(std::move(node));
    std::push_heap(open.begin(), open.end(), order);
  };
  push(std::move(root));
  int next_id = 1;
  double incumbent = kInf;
  double pruned_bound = kInf;  // min bound among nodes discarded by the gap test
  bool failure = false;
  bool unbounded = false;
  // keep basis inverses for warm starts only while they fit this budget (doubles)
  const std::size_t inverse_budget = 40'000'000;
  const std::size_t inverse_size = static_cast<std::size_t>(p.base.num_rows()) * static_cast<std::size_t>(p.base.num_rows());

  const auto gap_tol = [&](double inc) { return std::max(opt.gap_abs, opt.gap_rel * std::abs(inc)); };

  while (!open.empty()) {
    if (out.nodes >= opt.node_limit) break;
    std::pop_heap(open.begin(), open.end(), order);
    auto node = std::move(open.back());
    open.pop_back();
    if (incumbent < kInf && node->bound >= incumbent - gap_tol(incumbent)) {
      pruned_bound = std::min(pruned_bound, node->bound);
      continue;
    }
    ++out.nodes;

    bool empty_box = false;
    for (std::size_t k = 0; k < ni; ++k) {
      const auto j = static_cast<std::size_t>(ints[k]);
      lower[j] = node->lower[k];
      upper[j] = node->upper[k];
      if (lower[j] > upper[j]) empty_box = true;
    }
    LpOutcome lp;
    if (empty_box) {
      lp.status = LpStatus::Infeasible;
    } else {
      lp = engine.solve(lower, upper, opt.lp, node->basis.get());
    }
    if (opt.record_nodes)
      out.node_log.push_back({node->id, node->parent, node->bound, lp.status == LpStatus::Optimal ? lp.objective : kInf});

    if (lp.status == LpStatus::Infeasible) continue;
    if (lp.status == LpStatus::Unbounded) {
      unbounded = true;
      break;
    }
    if (lp.status != LpStatus::Optimal) {
      failure = true;
      break;
    }
    if (incumbent < kInf && lp.objective >= incumbent - gap_tol(incumbent)) {
      pruned_bound = std::min(pruned_bound, lp.objective);
      continue;
    }

    // most fractional integer column, lowest index on ties
    int branch = -1;
    double most = opt.int_tol;
    for (std::size_t k = 0; k < ni; ++k) {
      const double v = lp.x[static_cast<std::size_t>(ints[k])];
      const double frac = std::abs(v - std::round(v));
      if (frac > most) {
        most = frac;
        branch = static_cast<int>(k);
      }
    }

    if (branch < 0) {
      // integral: snap integers and re-solve the continuous part
      std::vector<double> x = lp.x;
      double obj = lp.objective;
      if (ni > 0) {
        std::vector<double> lo = lower, hi = upper;
        for (std::size_t k = 0; k < ni; ++k) {
          const auto j = static_cast<std::size_t>(ints[k]);
          lo[j] = hi[j] = std::round(lp.x[j]) + 0.0;  // no negative zeros in reported integers
        }
        LpOutcome polished = engine.solve(lo, hi, opt.lp, &lp.basis);
        if (polished.status == LpStatus::Optimal) {
          x = std::move(polished.x);
          obj = polished.objective;
          for (std::size_t k = 0; k < ni; ++k) {
            const auto j = static_cast<std::size_t>(ints[k]);
            x[j] = lo[j];
          }
        }
      }
      if (obj < incumbent) {
        incumbent = obj;
        out.x = std::move(x);
        out.objective = obj;
      }
      continue;
    }

    const auto bk = static_cast<std::size_t>(branch);
    const double v = lp.x[static_cast<std::size_t>(ints[bk])];
    auto shared_basis = std::make_shared<LpBasis>(std::move(lp.basis));
    if ((open.size() + 2) * inverse_size > inverse_budget) shared_basis->inverse.reset();
    auto up = std::make_unique<detail::BbNode>();
    up->id = next_id++;
    up->parent = node->id;
    up->depth = node->depth + 1;
    up->bound = lp.objective;
    up->lower = node->lower;
    up->upper = node->upper;
    up->lower[bk] = std::ceil(v);
    up->basis = shared_basis;
    auto down = std::make_unique<detail::BbNode>();
    down->id = next_id++;
    down->parent = node->id;
    down->depth = node->depth + 1;
    down->bound = lp.objective;
    down->lower = std::move(node->lower);
    down->upper = std::move(node->upper);
    down->upper[bk] = std::floor(v);
    down->basis = std::move(shared_basis);
    push(std::move(up));
    push(std::move(down));
  }

  if (failure) {
    out.status = MilpStatus::SolverFailure;
    return out;
  }
  if (unbounded) {
    out.status = MilpStatus::Unbounded;
    return out;
  }
  double open_bound = kInf;
  const bool exhausted = open.empty();
  for (const auto& node : open) open_bound = std::min(open_bound, node->bound);
  if (!exhausted) {
    out.status = MilpStatus::NodeLimit;
    out.best_bound = std::min({open_bound, pruned_bound, incumbent});
    return out;
  }
  if (incumbent == kInf) {
    out.status = MilpStatus::Infeasible;
    return out;
  }
  out.status = MilpStatus::Optimal;
  out.best_bound = std::min(pruned_bound, incumbent);
  return out;
}

inline MilpOutcome solve_milp(const Milp& p, double int_tol, double gap_abs, double gap_rel, int node_limit) {
  MilpOptions o;
  o.int_tol = int_tol;
  o.gap_abs = gap_abs;
  o.gap_rel = gap_rel;
  o.node_limit = node_limit;
  return solve_milp(p, o);
}

}  // namespace smil
