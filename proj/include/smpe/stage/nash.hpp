#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "smpe/stage/stage_game.hpp"

namespace smpe {

/// A mixed equilibrium of a stage game. Strategies are over each player's
/// local (feasible) actions.
struct NashPoint {
  std::vector<Eigen::VectorXd> strategy;
  Eigen::VectorXd payoff;
};

enum class NashMode { Auto, Exact, Approximate };

struct NashOptions {
  NashMode mode = NashMode::Auto;
  /// Largest pure-deviation gain accepted by the verification step.
  double best_response_tol = 1e-10;
  /// Equilibria closer than this in every strategy entry are merged.
  double dedup_tol = 1e-8;
  /// Size of the deterministic tie-breaking perturbation.
  double perturbation = 1e-12;
  /// Target and iteration cap of the approximate mode.
  double approx_epsilon = 1e-6;
  std::size_t approx_iterations = 200000;
};

struct NashSet {
  std::vector<NashPoint> points;  // sorted by payoff vector, then strategy
  std::size_t perturbed_count = 0;
  std::size_t unperturbed_count = 0;
  /// Enumerating the perturbed and the raw game gave different counts, so
  /// equilibrium components may be missing.
  bool degenerate = false;
  /// Largest deviation gain over the returned points (0 for exact points up
  /// to rounding).
  double epsilon = 0.0;
  bool approximate = false;
};

/// Equilibria of a finite game.
///
/// Exact mode enumerates supports: one player picks pure maximizers, two
/// players solve the linear indifference system for every pair of equal-size
/// supports, three players run damped Newton on the indifference system of
/// every support profile from 8 fixed starts. Candidates are found on a
/// slightly perturbed copy of the game as well as on the game itself, and
/// only those that pass the best-response check on the original game are
/// kept. Approximate mode runs regret matching and returns one
/// epsilon-equilibrium, throwing NoConvergence when the target is missed.
/// Auto picks exact mode for up to 3 players with at most 4 actions each
/// (2 players: at most 8 actions).
NashSet nash_enumerate(const StageGame& g, const NashOptions& options = {});

/// Largest gain any player gets from a pure deviation.
double deviation_gain(const StageGame& g, const std::vector<Eigen::VectorXd>& strategy);

}  // namespace smpe
