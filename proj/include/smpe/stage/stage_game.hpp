#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "smpe/game/profile_space.hpp"
#include "smpe/game/spec.hpp"

namespace smpe {

/// Continuation moments c[i][j][E] = sum over cells k of E of
/// mass_k * rho_j(k) * v_i(k).
struct AggregateVector {
  std::size_t players = 0;
  std::size_t components = 0;
  std::size_t coarse_cells = 0;
  std::vector<double> values;

  AggregateVector() = default;
  AggregateVector(std::size_t m, std::size_t j, std::size_t e)
      : players(m), components(j), coarse_cells(e), values(m * j * e, 0.0) {}

  double at(std::size_t i, std::size_t j, std::size_t e) const {
    return values[(i * components + j) * coarse_cells + e];
  }
  double& at(std::size_t i, std::size_t j, std::size_t e) {
    return values[(i * components + j) * coarse_cells + e];
  }
  double distance(const AggregateVector& other) const;
};

/// Aggregates of a per-cell value table (cells x players).
AggregateVector aggregate(const Eigen::MatrixXd& cell_values, const StochasticGameSpec& spec);

/// A normal-form game with `payoff(x, i)` the payoff of player i at local
/// profile x, where local action a of player i stands for global action
/// actions[i][a].
struct StageGame {
  std::vector<std::vector<std::size_t>> actions;
  ProfileSpace profiles;
  Eigen::MatrixXd payoff;

  StageGame() = default;
  StageGame(std::vector<std::vector<std::size_t>> actions, Eigen::MatrixXd payoff);

  std::size_t players() const noexcept { return actions.size(); }
};

/// Auxiliary one-shot game at `state`:
///
///     U_i(x) = (1 - b_i) u_i(s,x)
///            + b_i [ sum_j sum_E q_j(E,s,x) c[i][j][E] + sum_a v2(a,i) atom_mass(a|s,x) ]
///
/// with `v2` holding one row per atom and one column per player.
StageGame build_stage_game(const StochasticGameSpec& spec, std::size_t state,
                           const AggregateVector& c, const Eigen::MatrixXd& v2);

/// Global profile index of a local profile of the stage game at some state.
std::size_t global_profile(const StageGame& g, const ProfileSpace& global, std::size_t local);

/// Expected payoff vector of a mixed profile.
Eigen::VectorXd expected_payoff(const StageGame& g, const std::vector<Eigen::VectorXd>& strategy);

/// Expected payoff of every pure action of `player` against the others' mix.
Eigen::VectorXd action_values(const StageGame& g, const std::vector<Eigen::VectorXd>& strategy,
                              std::size_t player);

}  // namespace smpe
