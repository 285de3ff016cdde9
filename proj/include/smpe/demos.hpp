#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "smpe/game/spec.hpp"
#include "smpe/kernel/kernel_matrix.hpp"
#include "smpe/measure/operations.hpp"
#include "smpe/measure/selection.hpp"

namespace smpe {

/// Random Nowak-class game: `cells` divisible cells, J atomless components,
/// K atoms, random payoffs in [-1, 1] and discounts in [0, max_discount).
struct NowakInstanceOptions {
  std::size_t cells = 32;
  std::size_t components = 2;
  std::size_t atoms = 1;
  std::size_t players = 2;
  std::size_t actions = 2;
  double max_discount = 0.9;
};
StochasticGameSpec nowak_instance(std::uint64_t seed, const NowakInstanceOptions& options = {});

/// Inputs of one purify_selection call.
struct PurifyInstance {
  GridSpace space;
  std::vector<StepFunction> moments;
  CandidateField candidates;
  StepFunction vprime;
};

/// 2^k atomic cells of mass 2^-k in one coarse cell, moments w_n + 1 for the
/// Walsh functions w_n(c) = (-1)^popcount(n & c), candidates {-1, 1} and
/// vprime = 0. Requires 1 <= k <= 4.
PurifyInstance walsh_instance(std::size_t k);

/// Exhaustive search over all 2^(2^k) sign patterns of the Walsh instance;
/// returns how many match every moment of vprime exactly (integer arithmetic).
std::uint64_t walsh_matching_patterns(std::size_t k);

/// One atomic cell D (its own coarse cell) next to one divisible cell;
/// candidates {0, 1} on D and {0} elsewhere, vprime = 1/2 on D.
struct AtomInstance {
  PurifyInstance purify;
  std::vector<CellPortion> atom_set;  // D as a set
};
AtomInstance single_atom_instance();

/// Levy kernel restricted to C = D = "-1" with every other player on its first
/// action; one column per divisible source cell.
KernelMatrix levy_kernel_matrix(std::size_t cells, std::size_t block, double alpha = 1.0);

}  // namespace smpe
