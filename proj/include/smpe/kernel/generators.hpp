#pragma once

#include <cstddef>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "smpe/game/spec.hpp"

namespace smpe {

/// Players, actions and stage payoffs for a generated game. An empty payoff
/// function means zero payoffs.
struct GameConfig {
  std::vector<double> discounts;
  std::vector<std::vector<std::string>> actions;
  double payoff_bound = 1.0;
  std::function<double(std::size_t state, std::size_t profile, std::size_t player)> payoff;
};

/// Levy's example on [0, 1) with an absorbing atom at 1.
///
/// The reference measure is (1 - atom_weight) times Lebesgue measure on [0, 1)
/// plus atom_weight times the Dirac mass at 1. The interval is cut into N
/// equal divisible cells (state c has source point at the cell midpoint) and
/// the atom is state N. Coarse cells are consecutive blocks of `block_size`
/// cells; the kernel is written with J = block_size components, rho_j the
/// indicator of position j inside a block, which is always possible and is
/// the smallest J when the blocks have full rank.
struct LevyParams {
  double alpha = 1.0;
  std::size_t theta_players = 1;  // M
  std::size_t cells = 8;          // N
  std::size_t block_size = 0;     // 0 means N (a single block)
  double atom_weight = 0.5;
  double discount = 0.5;
  /// Evaluate U(s,1) at target-cell midpoints instead of integrating it over
  /// each cell. Midpoint values are not renormalized.
  bool midpoint = false;
};

/// Player order: A, B, C, D, theta^1..theta^M. A and B choose from
/// {L, M, R}, every theta from {L, R}, C and D from {1, -1}. Payoffs are
/// zero; set them on the returned spec if needed.
StochasticGameSpec make_levy_game(const LevyParams& p);

/// Fraction of the source interval's uniform part that goes to U(s,1) under
/// the actions of C and D (1 for (-1,-1), 1/2 when they differ, 0 for (1,1)).
double levy_uniform_share(std::size_t c_action, std::size_t d_action);

/// Nowak's class: the transition is a mixture of J fixed atomless
/// distributions and K Dirac masses, with mixing weights depending on the
/// state and the action profile.
struct NowakParams {
  std::size_t cells = 0;                      // divisible cells carrying mu_j
  std::vector<std::vector<double>> mu;        // J probability vectors over cells
  std::size_t atoms = 0;                      // K
  /// Returns (q_1..q_J, b_1..b_K) for a state in 0..cells+K and a profile.
  std::function<std::vector<double>(std::size_t state, std::size_t profile)> weights;
};

/// States are the divisible cells followed by the K atoms. The reference
/// measure is the uniform mixture of all J + K components, rho_j the density
/// of mu_j against it, and all divisible cells form one coarse cell.
StochasticGameSpec make_nowak_game(const NowakParams& p, const GameConfig& config);

/// Noisy game on H x R: h' is drawn from alpha(.|s,x) against kappa, and the
/// noise r' from beta(.|h') against nu.
struct NoisyGameParams {
  std::vector<double> kappa;              // masses of the H cells
  std::vector<double> nu;                 // masses of the R cells
  std::vector<std::vector<double>> beta;  // beta[h][r], density against nu
  /// Density of h' against kappa given the state (product index) and profile.
  std::function<double(std::size_t h_next, std::size_t state, std::size_t profile)> alpha;
};

/// Product grid with cell (h, r) at index h * |R| + r and mass
/// kappa(h) nu(r) beta(r|h); coarse cells are the H cells and the kernel has
/// one component with q_1(h', s, x) = alpha(h'|s,x) and rho_1 = 1.
StochasticGameSpec make_noisy_game(const NoisyGameParams& p, const GameConfig& config);

/// Random generators used by tests, demos and benchmarks.
GameConfig random_game_config(std::mt19937_64& rng, std::size_t players, std::size_t actions,
                              std::size_t states, double max_discount, double payoff_bound = 1.0);
NowakParams random_nowak_params(std::mt19937_64& rng, std::size_t cells, std::size_t j,
                                std::size_t k, std::size_t profiles);
NoisyGameParams random_noisy_params(std::mt19937_64& rng, std::size_t h_cells,
                                    std::size_t r_cells, std::size_t profiles, bool tilted);

}  // namespace smpe
