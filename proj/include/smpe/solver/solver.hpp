#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "smpe/game/spec.hpp"
#include "smpe/measure/operations.hpp"
#include "smpe/solver/result.hpp"
#include "smpe/stage/nash.hpp"
#include "smpe/stage/stage_game.hpp"

namespace smpe {

struct SolveOptions {
  /// Outer stopping rule: sup-change of aggregates and atom values.
  double tol = 1e-10;
  std::size_t max_iter = 500;
  /// Floor gamma_min of the step size gamma_t = max(gamma_min, 1/(t+2)).
  double damping = 0.5;
  /// Extra runs from seeded random starts after a failed run.
  std::size_t restarts = 3;
  std::uint64_t seed = 0;
  double inner_tol = 1e-10;
  std::size_t inner_max_iter = 1000000;
  std::size_t threads = 1;
  NashOptions nash;
  PurifyOptions purify;
};

/// One application of the atom operator: every player's best expected
/// stage-game payoff at every atom against the others' part of `f`
/// (one mixed profile per atom, over global actions). `v2` has one row per
/// atom and one column per player.
Eigen::MatrixXd atom_value_operator(const std::vector<MixedProfile>& f, const AggregateVector& c,
                                    const Eigen::MatrixXd& v2, const StochasticGameSpec& spec);

struct AtomFixedPoint {
  Eigen::MatrixXd values;
  std::size_t iterations = 0;  // operator applications
};

/// Iterates the atom operator from `start` until successive iterates differ
/// by at most `tol` in sup norm (a single application when every discount is
/// zero). Throws NoConvergence after `max_iter` applications.
AtomFixedPoint atom_fixed_point(const std::vector<MixedProfile>& f, const AggregateVector& c,
                                const Eigen::MatrixXd& start, const StochasticGameSpec& spec,
                                double tol = 1e-10, std::size_t max_iter = 1000000);

/// Stationary Markov perfect epsilon-equilibrium by damped iteration on the
/// continuation aggregates and atom values, followed by purification of the
/// convexified cell values and certification by the verifier.
///
/// Throws ValidationError for an invalid game, PreconditionFailed when the
/// decomposed kernel reaches a positive-mass atom, NoConvergence (carrying
/// the best certified epsilon) when no run meets `tol`.
EquilibriumResult solve(const StochasticGameSpec& spec, const SolveOptions& options = {});

/// Local mixed strategy of a stage game lifted to global action vectors.
MixedProfile to_global(const StageGame& g, const std::vector<Eigen::VectorXd>& local,
                       const StochasticGameSpec& spec);

}  // namespace smpe
