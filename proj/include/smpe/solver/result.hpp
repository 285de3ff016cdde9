#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "smpe/measure/selection.hpp"

namespace smpe {

/// Mixed action of every player, each over that player's global action list
/// (zero weight on infeasible actions).
using MixedProfile = std::vector<Eigen::VectorXd>;

struct SolverDiagnostics {
  std::size_t iterations = 0;        // outer iterations of the returned run
  std::size_t total_iterations = 0;  // over all runs
  std::size_t restarts = 0;          // runs started after the first
  bool converged = false;
  double final_change = 0.0;
  std::vector<double> residual_history;  // sup-change per iteration, returned run
  std::size_t max_inner_iterations = 0;
  std::size_t degenerate_states = 0;  // stage games flagged degenerate at the end
  /// Largest |moment(v*) - moment(v')| over players, components and coarse cells.
  double purification_gap = 0.0;
  double recursion_gap = 0.0;
  /// Number of pieces per cell after purification.
  std::vector<std::size_t> pieces_per_cell;
};

/// A stationary strategy profile with its value, both constant on the
/// sub-intervals (pieces) of every cell. Atomic cells carry a single piece.
struct EquilibriumResult {
  SplitSelection value;                            // payoff vector per piece
  std::vector<std::vector<MixedProfile>> strategy;  // [cell][piece]
  double epsilon = 0.0;
  SolverDiagnostics diagnostics;
};

}  // namespace smpe
