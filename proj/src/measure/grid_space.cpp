#include "smpe/measure/grid_space.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "smpe/errors.hpp"

namespace smpe {

GridSpace::GridSpace(std::vector<Cell> cells, std::vector<std::size_t> coarse_map)
    : cells_(std::move(cells)), coarse_map_(std::move(coarse_map)) {
  if (coarse_map_.size() != cells_.size()) {
    throw InvalidInput(fmt::format("coarse map has {} entries for {} cells", coarse_map_.size(),
                                   cells_.size()));
  }
  std::size_t coarse_count = 0;
  for (std::size_t k = 0; k < cells_.size(); ++k) {
    const double m = cells_[k].mass;
    if (!std::isfinite(m) || m < 0.0) {
      throw InvalidInput(fmt::format("cell {} has invalid mass {}", k, m));
    }
    coarse_count = std::max(coarse_count, coarse_map_[k] + 1);
  }
  members_.assign(coarse_count, {});
  for (std::size_t k = 0; k < cells_.size(); ++k) members_[coarse_map_[k]].push_back(k);
  for (std::size_t e = 0; e < coarse_count; ++e) {
    if (members_[e].empty()) throw InvalidInput(fmt::format("coarse cell {} is empty", e));
  }
  for (const Cell& c : cells_) total_mass_ += c.mass;
}

GridSpace GridSpace::fine(std::vector<Cell> cells) {
  std::vector<std::size_t> map(cells.size());
  for (std::size_t k = 0; k < map.size(); ++k) map[k] = k;
  return GridSpace(std::move(cells), std::move(map));
}

double GridSpace::coarse_mass(std::size_t coarse) const {
  double sum = 0.0;
  for (std::size_t k : members(coarse)) sum += cells_[k].mass;
  return sum;
}

std::vector<std::size_t> GridSpace::atomic_cells() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < cells_.size(); ++k)
    if (!cells_[k].divisible) out.push_back(k);
  return out;
}

std::vector<std::size_t> GridSpace::divisible_cells() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < cells_.size(); ++k)
    if (cells_[k].divisible) out.push_back(k);
  return out;
}

GridSpace GridSpace::restricted(std::span<const std::size_t> keep) const {
  std::vector<Cell> cells;
  std::vector<std::size_t> map;
  std::vector<std::size_t> renumber(members_.size(), static_cast<std::size_t>(-1));
  std::size_t next = 0;
  for (std::size_t k : keep) {
    if (k >= cells_.size()) throw InvalidInput(fmt::format("cell {} out of range", k));
    const std::size_t e = coarse_map_[k];
    if (renumber[e] == static_cast<std::size_t>(-1)) renumber[e] = next++;
    cells.push_back(cells_[k]);
    map.push_back(renumber[e]);
  }
  return GridSpace(std::move(cells), std::move(map));
}

StepFunction::StepFunction(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (!values_.allFinite()) throw InvalidInput("step function has non-finite entries");
}

StepFunction StepFunction::scalar(std::span<const double> values) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(values.size()), 1);
  for (std::size_t k = 0; k < values.size(); ++k) m(static_cast<Eigen::Index>(k), 0) = values[k];
  return StepFunction(std::move(m));
}

StepFunction StepFunction::constant(std::size_t cells, const Eigen::VectorXd& value) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(cells), value.size());
  for (Eigen::Index k = 0; k < m.rows(); ++k) m.row(k) = value.transpose();
  return StepFunction(std::move(m));
}

}  // namespace smpe
