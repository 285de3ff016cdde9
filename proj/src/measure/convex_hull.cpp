#include "smpe/measure/convex_hull.hpp"

#include <algorithm>
#include <limits>

#include <Eigen/QR>

#include "smpe/errors.hpp"

namespace smpe {

namespace {

constexpr double kNegativeWeightTol = 1e-12;

// Barycentric fit of `target` against the affine hull of the support.
// Empty optional when the support is affinely dependent.
std::optional<ConvexCombination> affine_fit(std::span<const Eigen::VectorXd> points,
                                            const std::vector<std::size_t>& support,
                                            const Eigen::VectorXd& target) {
  const Eigen::VectorXd& base = points[support.front()];
  const auto r = static_cast<Eigen::Index>(support.size());
  ConvexCombination out;
  out.support = support;
  out.weights.assign(support.size(), 0.0);
  if (r == 1) {
    out.weights[0] = 1.0;
    out.point = base;
    return out;
  }
  Eigen::MatrixXd directions(base.size(), r - 1);
  for (Eigen::Index k = 1; k < r; ++k)
    directions.col(k - 1) = points[support[static_cast<std::size_t>(k)]] - base;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(directions);
  qr.setThreshold(1e-10);
  if (qr.rank() < r - 1) return std::nullopt;
  const Eigen::VectorXd lambda = qr.solve(target - base);
  out.weights[0] = 1.0 - lambda.sum();
  for (Eigen::Index k = 1; k < r; ++k) out.weights[static_cast<std::size_t>(k)] = lambda(k - 1);
  out.point = base + directions * lambda;
  return out;
}

bool nonnegative(const ConvexCombination& c) {
  return std::all_of(c.weights.begin(), c.weights.end(),
                     [](double w) { return w >= -kNegativeWeightTol; });
}

void clip_and_renormalize(std::span<const Eigen::VectorXd> points, ConvexCombination& c) {
  double sum = 0.0;
  for (double& w : c.weights) {
    w = std::max(w, 0.0);
    sum += w;
  }
  for (double& w : c.weights) w /= sum;
  c.point = Eigen::VectorXd::Zero(points[c.support.front()].size());
  for (std::size_t k = 0; k < c.support.size(); ++k) c.point += c.weights[k] * points[c.support[k]];
}

// Calls visit(support) on every subset of {0..n-1} of size 1..max_size, by
// size and then lexicographically; stops early when visit returns true.
template <typename Visit>
void for_each_support(std::size_t n, std::size_t max_size, Visit&& visit) {
  for (std::size_t r = 1; r <= std::min(n, max_size); ++r) {
    std::vector<std::size_t> idx(r);
    for (std::size_t k = 0; k < r; ++k) idx[k] = k;
    while (true) {
      if (visit(idx)) return;
      std::size_t pos = r;
      while (pos > 0 && idx[pos - 1] == n - r + pos - 1) --pos;
      if (pos == 0) break;
      ++idx[pos - 1];
      for (std::size_t k = pos; k < r; ++k) idx[k] = idx[k - 1] + 1;
    }
  }
}

void check_points(std::span<const Eigen::VectorXd> points, const Eigen::VectorXd& target) {
  if (points.empty()) throw InvalidInput("convex hull of an empty point set");
  for (const auto& p : points) {
    if (p.size() != target.size()) throw InvalidInput("point dimension mismatch");
  }
}

}  // namespace

std::optional<ConvexCombination> caratheodory_weights(std::span<const Eigen::VectorXd> points,
                                                      const Eigen::VectorXd& target, double tol) {
  check_points(points, target);
  std::optional<ConvexCombination> found;
  const auto max_size = static_cast<std::size_t>(target.size()) + 1;
  for_each_support(points.size(), max_size, [&](const std::vector<std::size_t>& support) {
    auto fit = affine_fit(points, support, target);
    if (!fit || !nonnegative(*fit)) return false;
    if ((fit->point - target).lpNorm<Eigen::Infinity>() > tol) return false;
    clip_and_renormalize(points, *fit);
    found = std::move(fit);
    return true;
  });
  return found;
}

ConvexCombination project_onto_hull(std::span<const Eigen::VectorXd> points,
                                    const Eigen::VectorXd& target) {
  check_points(points, target);
  ConvexCombination best;
  double best_dist = std::numeric_limits<double>::infinity();
  const auto max_size = static_cast<std::size_t>(target.size()) + 1;
  for_each_support(points.size(), max_size, [&](const std::vector<std::size_t>& support) {
    auto fit = affine_fit(points, support, target);
    if (!fit || !nonnegative(*fit)) return false;
    clip_and_renormalize(points, *fit);
    const double dist = (fit->point - target).squaredNorm();
    if (best.support.empty() || dist < best_dist - 1e-14 * (1.0 + best_dist)) {
      best_dist = dist;
      best = std::move(*fit);
    }
    return best_dist == 0.0;
  });
  return best;
}

}  // namespace smpe
