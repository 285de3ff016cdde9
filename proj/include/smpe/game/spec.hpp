#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "smpe/game/profile_space.hpp"
#include "smpe/measure/grid_space.hpp"

namespace smpe {

/// Transition density on the atomless part written as
///
///     q(k | s, x) = sum_j q_j(E(k), s, x) * rho_j(k)
///
/// where E(k) is the coarse cell of fine cell k. Each q_j is indexed by coarse
/// cell, so it is measurable with respect to the coarse partition by
/// construction; rho_j is an arbitrary nonnegative step function.
struct KernelDecomposition {
  std::size_t components = 0;  // J
  std::size_t coarse_cells = 0;
  std::size_t states = 0;
  std::size_t profiles = 0;
  std::vector<std::vector<double>> rho;  // [j][cell]
  std::vector<double> q;                 // [j][E][s][x]

  KernelDecomposition() = default;
  /// Zero-filled decomposition; `cells` sizes each rho_j.
  KernelDecomposition(std::size_t j, std::size_t coarse, std::size_t states, std::size_t profiles,
                      std::size_t cells);

  std::size_t offset(std::size_t j, std::size_t e, std::size_t s, std::size_t x) const {
    return ((j * coarse_cells + e) * states + s) * profiles + x;
  }
  double at(std::size_t j, std::size_t e, std::size_t s, std::size_t x) const {
    return q[offset(j, e, s, x)];
  }
  double& at(std::size_t j, std::size_t e, std::size_t s, std::size_t x) {
    return q[offset(j, e, s, x)];
  }
  StepFunction density(std::size_t j) const { return StepFunction::scalar(rho.at(j)); }

  bool operator==(const KernelDecomposition&) const = default;
};

/// Probability mass sent to each atom: entry (a, s, x) is q(s2|s,x) * lambda(s2)
/// for the a-th atomic cell s2.
struct AtomKernel {
  std::size_t atoms = 0;
  std::size_t states = 0;
  std::size_t profiles = 0;
  std::vector<double> mass;  // [a][s][x]

  AtomKernel() = default;
  AtomKernel(std::size_t atoms, std::size_t states, std::size_t profiles)
      : atoms(atoms), states(states), profiles(profiles), mass(atoms * states * profiles, 0.0) {}

  double at(std::size_t a, std::size_t s, std::size_t x) const {
    return mass[(a * states + s) * profiles + x];
  }
  double& at(std::size_t a, std::size_t s, std::size_t x) {
    return mass[(a * states + s) * profiles + x];
  }

  bool operator==(const AtomKernel&) const = default;
};

/// A discounted stochastic game on a grid state space.
///
/// States are the fine cells of `space`; atomic cells are the atoms of the
/// reference measure and receive transition mass through `atom_kernel`,
/// divisible cells through `kernel`. Actions are global labels per player with
/// a per-state feasibility list. Payoffs are stored for every global profile;
/// only feasible entries are meaningful.
struct StochasticGameSpec {
  std::vector<double> discounts;                              // beta_i in [0, 1)
  std::vector<std::vector<std::string>> actions;              // labels per player
  double payoff_bound = 1.0;                                  // C
  GridSpace space;
  std::vector<std::vector<std::vector<std::size_t>>> feasible;  // [s][i] -> action indices
  std::vector<double> payoffs;                                // [s][x][i]
  KernelDecomposition kernel;
  AtomKernel atom_kernel;

  std::size_t players() const noexcept { return discounts.size(); }
  std::size_t states() const noexcept { return space.size(); }
  ProfileSpace profile_space() const;
  std::size_t profile_count() const;
  /// Atomic cells in ascending order; atom a of `atom_kernel` is atoms()[a].
  std::vector<std::size_t> atoms() const { return space.atomic_cells(); }
  double max_discount() const;

  double payoff(std::size_t s, std::size_t x, std::size_t i) const {
    return payoffs[(s * profile_count() + x) * players() + i];
  }
  double& payoff(std::size_t s, std::size_t x, std::size_t i) {
    return payoffs[(s * profile_count() + x) * players() + i];
  }

  bool feasible_profile(std::size_t s, std::size_t x) const;
  std::vector<std::size_t> feasible_profiles(std::size_t s) const;

  /// Probability of moving from (s, x) into fine cell `target` through the
  /// decomposed kernel.
  double decomposed_mass(std::size_t target, std::size_t s, std::size_t x) const;
  /// Total transition probability out of (s, x).
  double total_mass(std::size_t s, std::size_t x) const;

  bool operator==(const StochasticGameSpec&) const = default;
};

/// Allocates a zero game on `space` with every action feasible everywhere,
/// `components` kernel components and no transition mass.
StochasticGameSpec make_blank_game(std::vector<double> discounts,
                                   std::vector<std::vector<std::string>> actions,
                                   double payoff_bound, GridSpace space, std::size_t components);

/// Throws InvalidInput if array sizes disagree with the declared dimensions.
void require_consistent_dimensions(const StochasticGameSpec& spec);

}  // namespace smpe
