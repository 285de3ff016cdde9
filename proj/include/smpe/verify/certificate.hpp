#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "smpe/game/spec.hpp"
#include "smpe/solver/result.hpp"

namespace smpe {

/// A piece of a cell: the state simulated or checked.
struct PieceRef {
  std::size_t cell = 0;
  std::size_t piece = 0;
};

struct SimulationReport {
  PieceRef start;
  Eigen::VectorXd mean;            // per player
  Eigen::VectorXd standard_error;  // per player
  std::size_t paths = 0;
  std::size_t horizon = 0;
  std::uint64_t seed = 0;
  /// Share of periods after the first spent on atomic cells.
  double atom_occupancy = 0.0;
};

struct Certificate {
  /// gains[cell][piece](i): the larger of the best pure deviation gain and
  /// the gap between the prescribed play and the reported value.
  std::vector<std::vector<Eigen::VectorXd>> gains;
  double epsilon = 0.0;
  /// Sup-norm gap between the reported value and the exact discounted value
  /// of the reported strategy.
  double recursion_gap = 0.0;
  std::optional<SimulationReport> simulation;
};

/// One-shot deviation check of a stationary profile against its reported
/// value, evaluated on every piece of every cell:
///
///     R_i(a) = (1 - b_i) E[u_i(s, a, x_-i)] + b_i E[ integral of v_i dQ(.|s, a, x_-i) ]
///
/// with x_-i drawn from the piece's strategy. The gain of player i is
/// max(max_a R_i(a) - v_i, |R_i(f) - v_i|). Also solves the linear recursion
/// for the exact value of the strategy and reports its distance to v.
/// Throws InvalidInput when the result does not fit the game.
Certificate deviation_residual(const EquilibriumResult& result, const StochasticGameSpec& spec);

/// Exact discounted value of the strategy on every piece, [cell][piece].
std::vector<std::vector<Eigen::VectorXd>> strategy_value(const EquilibriumResult& result,
                                                         const StochasticGameSpec& spec);

struct SimulationOptions {
  /// Periods simulated; chosen from `truncation` when absent.
  std::optional<std::size_t> horizon;
  /// Bound on the discarded tail, max_i b_i^H * C.
  double truncation = 1e-8;
  std::size_t paths = 10000;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
};

/// Smallest horizon H with b^H * C <= truncation (1 when b = 0).
std::size_t horizon_for(double max_discount, double payoff_bound, double truncation);

/// Monte Carlo estimate of the discounted payoff from `start`. Path p draws
/// from the Philox stream (seed, p), so reports are reproducible bit for bit
/// regardless of the thread count. Throws InvalidInput on an inconsistent
/// horizon and truncation, zero paths, or a bad start.
SimulationReport simulate_payoffs(const StochasticGameSpec& spec, const EquilibriumResult& result,
                                  PieceRef start, const SimulationOptions& options);

}  // namespace smpe
