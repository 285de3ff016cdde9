#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace smpe {

/// One fine cell of the state grid.
///
/// A divisible cell stands for a piece of the atomless part of the state
/// space: any fraction of its mass can be carved out of it. An atomic cell is
/// a single indivisible atom of the reference measure.
struct Cell {
  double mass = 0.0;
  bool divisible = true;

  bool operator==(const Cell&) const = default;
};

/// Finite representation of a measure space together with a coarse partition.
///
/// Fine cells generate the full sigma-algebra; the coarse partition (every
/// coarse cell a nonempty union of fine cells) generates the sub-sigma-algebra
/// against which transition kernels are required to be measurable.
class GridSpace {
 public:
  GridSpace() = default;

  /// Throws InvalidInput on negative or non-finite masses, or when the coarse
  /// map is not a surjection onto 0..max.
  GridSpace(std::vector<Cell> cells, std::vector<std::size_t> coarse_map);

  /// Each fine cell forms its own coarse cell.
  static GridSpace fine(std::vector<Cell> cells);

  std::size_t size() const noexcept { return cells_.size(); }
  std::size_t coarse_count() const noexcept { return members_.size(); }

  const Cell& cell(std::size_t k) const { return cells_.at(k); }
  const std::vector<Cell>& cells() const noexcept { return cells_; }
  double mass(std::size_t k) const { return cells_.at(k).mass; }
  bool divisible(std::size_t k) const { return cells_.at(k).divisible; }

  std::size_t coarse_of(std::size_t k) const { return coarse_map_.at(k); }
  const std::vector<std::size_t>& coarse_map() const noexcept { return coarse_map_; }
  const std::vector<std::size_t>& members(std::size_t coarse) const {
    return members_.at(coarse);
  }

  double total_mass() const noexcept { return total_mass_; }
  double coarse_mass(std::size_t coarse) const;

  /// Indices of atomic cells, ascending.
  std::vector<std::size_t> atomic_cells() const;
  /// Indices of divisible cells, ascending.
  std::vector<std::size_t> divisible_cells() const;

  /// Sub-space on the given cells (ascending, unique). Coarse cells that
  /// survive are renumbered in order of first appearance.
  GridSpace restricted(std::span<const std::size_t> keep) const;

  bool operator==(const GridSpace& other) const {
    return cells_ == other.cells_ && coarse_map_ == other.coarse_map_;
  }

 private:
  std::vector<Cell> cells_;
  std::vector<std::size_t> coarse_map_;
  std::vector<std::vector<std::size_t>> members_;
  double total_mass_ = 0.0;
};

/// A function constant on every fine cell, with values in R^d.
///
/// Row k of the underlying matrix is the value on cell k.
class StepFunction {
 public:
  StepFunction() = default;
  explicit StepFunction(Eigen::MatrixXd values);

  static StepFunction scalar(std::span<const double> values);
  static StepFunction constant(std::size_t cells, const Eigen::VectorXd& value);

  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(values_.cols()); }

  Eigen::VectorXd at(std::size_t k) const { return values_.row(static_cast<Eigen::Index>(k)).transpose(); }
  double scalar_at(std::size_t k) const { return values_(static_cast<Eigen::Index>(k), 0); }
  const Eigen::MatrixXd& values() const noexcept { return values_; }

 private:
  Eigen::MatrixXd values_;
};

/// Part of a fine cell: `mass` is the portion of the cell's mass that belongs
/// to the set being described.
struct CellPortion {
  std::size_t cell = 0;
  double mass = 0.0;
};

}  // namespace smpe
