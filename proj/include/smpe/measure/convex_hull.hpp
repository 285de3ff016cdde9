#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace smpe {

/// Convex weights over a subset of a finite point list.
struct ConvexCombination {
  std::vector<std::size_t> support;  // ascending point indices
  std::vector<double> weights;       // same length as support, sum to one
  Eigen::VectorXd point;             // sum of weights[k] * points[support[k]]
};

/// Represents `target` as a convex combination of at most dim+1 affinely
/// independent points. Supports are tried by increasing size, then in
/// lexicographic order, so the answer is the lexicographically smallest
/// minimal support. Returns nullopt if `target` is farther than `tol`
/// (sup norm) from the hull.
std::optional<ConvexCombination> caratheodory_weights(std::span<const Eigen::VectorXd> points,
                                                      const Eigen::VectorXd& target,
                                                      double tol = 1e-9);

/// Euclidean projection of `target` onto the convex hull of `points`.
/// Among equally distant representations the first in (size, lexicographic)
/// support order wins.
ConvexCombination project_onto_hull(std::span<const Eigen::VectorXd> points,
                                    const Eigen::VectorXd& target);

}  // namespace smpe
