#pragma once

#include <cstddef>
#include <vector>

#include "smpe/game/spec.hpp"
#include "smpe/solver/result.hpp"

namespace smpe {

/// Probability of landing in each cell after (s, x), atoms included.
struct TransitionTable {
  std::size_t states = 0;
  std::size_t profiles = 0;
  std::vector<double> mass;  // [s][x][cell]

  explicit TransitionTable(const StochasticGameSpec& spec);
  const double* row(std::size_t s, std::size_t x) const { return &mass[(s * profiles + x) * states]; }
};

/// Throws InvalidInput unless the result has one strategy per piece, each a
/// probability vector over the player's actions supported on feasible ones.
void require_result_fits(const EquilibriumResult& result, const StochasticGameSpec& spec);

}  // namespace smpe
