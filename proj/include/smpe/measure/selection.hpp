#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "smpe/measure/grid_space.hpp"

namespace smpe {

/// A sub-interval of a fine cell carrying one value.
///
/// `tag` identifies where the value came from (the index of the candidate it
/// was drawn from, for purified selections).
struct SplitPiece {
  double fraction = 1.0;
  Eigen::VectorXd value;
  std::size_t tag = 0;
};

/// A measurable function that is constant on finitely many sub-intervals of
/// each fine cell. Fractions per cell are nonnegative and sum to one; atomic
/// cells carry exactly one piece.
class SplitSelection {
 public:
  SplitSelection() = default;

  /// Throws InvalidInput if any invariant fails.
  SplitSelection(const GridSpace& space, std::vector<std::vector<SplitPiece>> pieces);

  /// One piece per cell taking the value of `f` on that cell.
  static SplitSelection from_step(const GridSpace& space, const StepFunction& f);

  std::size_t size() const noexcept { return pieces_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const SplitPiece> pieces(std::size_t cell) const { return pieces_.at(cell); }
  const std::vector<std::vector<SplitPiece>>& all() const noexcept { return pieces_; }
  std::size_t piece_count() const noexcept;

  /// Fraction-weighted average over the pieces of `cell`.
  Eigen::VectorXd average(std::size_t cell) const;
  /// Cell averages as a step function.
  StepFunction averages() const;

 private:
  std::vector<std::vector<SplitPiece>> pieces_;
  std::size_t dim_ = 0;
};

/// Per fine cell, a finite nonempty set of admissible values.
class CandidateField {
 public:
  CandidateField() = default;
  explicit CandidateField(std::vector<std::vector<Eigen::VectorXd>> sets);

  std::size_t size() const noexcept { return sets_.size(); }
  const std::vector<Eigen::VectorXd>& at(std::size_t cell) const { return sets_.at(cell); }

 private:
  std::vector<std::vector<Eigen::VectorXd>> sets_;
};

}  // namespace smpe
