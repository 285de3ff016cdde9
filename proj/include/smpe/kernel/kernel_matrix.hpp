#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "smpe/game/spec.hpp"
#include "smpe/measure/grid_space.hpp"

namespace smpe {

/// Transition densities of the atomless part, one row per target cell and one
/// column per (source state, action profile) pair.
///
/// Entry (r, c) is q(k | s, x) with respect to the reference measure, where k
/// is cell r of `space`. When built from a game, `space` is the game's space
/// restricted to its divisible cells and `targets` maps rows back to game cells.
struct KernelMatrix {
  GridSpace space;
  std::vector<std::size_t> targets;                       // row -> original cell
  std::vector<std::pair<std::size_t, std::size_t>> columns;  // (state, profile)
  Eigen::MatrixXd values;
};

using ColumnFilter = std::function<bool(std::size_t state, std::size_t profile)>;

/// Kernel matrix of the decomposed (atomless) transition of a game. Columns
/// run over states, then feasible profiles, keeping those accepted by
/// `filter` (all when empty).
KernelMatrix kernel_matrix(const StochasticGameSpec& spec, const ColumnFilter& filter = {});

struct CoarserVerdict {
  bool coarser = false;
  /// Largest absolute difference between two rows of one coarse cell.
  double max_row_deviation = 0.0;
  /// No positive-mass row sits on an atomic cell.
  bool no_g_atom = true;
};

/// Rows must agree within every coarse cell (to `tol`) and every
/// positive-mass row must be a divisible cell.
CoarserVerdict check_coarser_detail(const KernelMatrix& m, double tol = 1e-10);
inline bool check_coarser(const KernelMatrix& m, double tol = 1e-10) {
  return check_coarser_detail(m, tol).coarser;
}

/// Numerical rank of each coarse row block: the number of singular values
/// above `threshold`. Empty blocks have rank 0.
std::vector<std::size_t> block_rank_profile(const KernelMatrix& m, double threshold = 1e-8);

}  // namespace smpe
