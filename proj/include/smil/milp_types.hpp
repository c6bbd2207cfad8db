#pragma once

// MILP problem and result types, shared by the branch-and-bound solver and
// the enumeration oracles.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "smil/lp.hpp"

namespace smil {

struct Milp {
  LinearProgram base;
  std::vector<int> integers;  // 0-based column indices

  /// Throws std::invalid_argument if an integer column lacks finite bounds.
  void validate() const {
    base.validate();
    for (int j : integers) {
      if (j < 0 || j >= base.num_vars()) throw std::invalid_argument("integer index out of range");
      const auto uj = static_cast<std::size_t>(j);
      if (!std::isfinite(base.lower[uj]) || !std::isfinite(base.upper[uj]))
        throw std::invalid_argument("integer variable " + std::to_string(j) + " needs finite bounds");
    }
  }
};

enum class MilpStatus : std::uint8_t { Optimal, Infeasible, NodeLimit, Unbounded, SolverFailure };

inline const char* to_string(MilpStatus s) {
  switch (s) {
    case MilpStatus::Optimal: return "optimal";
    case MilpStatus::Infeasible: return "infeasible";
    case MilpStatus::NodeLimit: return "node_limit";
    case MilpStatus::Unbounded: return "unbounded";
    case MilpStatus::SolverFailure: return "solver_failure";
  }
  return "?";
}

/// One processed node, recorded when MilpOptions::record_nodes is set.
struct NodeRecord {
  int id = 0;
  int parent = -1;
  double parent_bound = -kInf;
  double lp_bound = kInf;  // +inf when the node LP is infeasible
};

struct MilpOutcome {
  MilpStatus status = MilpStatus::SolverFailure;
  std::vector<double> x;  // incumbent, empty if none
  double objective = kInf;
  int nodes = 0;
  double best_bound = -kInf;
  std::vector<NodeRecord> node_log;
};

}  // namespace smil
