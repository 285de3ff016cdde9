#include "smpe/measure/selection.hpp"

#include <cmath>

#include <fmt/format.h>

#include "smpe/errors.hpp"

namespace smpe {

namespace {
constexpr double kFractionTol = 1e-12;
}

SplitSelection::SplitSelection(const GridSpace& space, std::vector<std::vector<SplitPiece>> pieces)
    : pieces_(std::move(pieces)) {
  if (pieces_.size() != space.size()) {
    throw InvalidInput(
        fmt::format("selection has {} cells, space has {}", pieces_.size(), space.size()));
  }
  bool have_dim = false;
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const auto& cell = pieces_[k];
    if (cell.empty()) throw InvalidInput(fmt::format("cell {} carries no pieces", k));
    if (!space.divisible(k) && cell.size() != 1) {
      throw InvalidInput(fmt::format("atomic cell {} carries {} pieces", k, cell.size()));
    }
    double sum = 0.0;
    for (const SplitPiece& p : cell) {
      if (!std::isfinite(p.fraction) || p.fraction < 0.0) {
        throw InvalidInput(fmt::format("cell {} has invalid fraction {}", k, p.fraction));
      }
      if (!have_dim) {
        dim_ = static_cast<std::size_t>(p.value.size());
        have_dim = true;
      } else if (static_cast<std::size_t>(p.value.size()) != dim_) {
        throw InvalidInput(fmt::format("cell {} has a value of dimension {}, expected {}", k,
                                       p.value.size(), dim_));
      }
      if (!p.value.allFinite()) throw InvalidInput(fmt::format("cell {} has non-finite value", k));
      sum += p.fraction;
    }
    if (std::abs(sum - 1.0) > kFractionTol) {
      throw InvalidInput(fmt::format("cell {} fractions sum to {:.17g}", k, sum));
    }
  }
}

SplitSelection SplitSelection::from_step(const GridSpace& space, const StepFunction& f) {
  std::vector<std::vector<SplitPiece>> pieces(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) pieces[k].push_back({1.0, f.at(k), 0});
  return SplitSelection(space, std::move(pieces));
}

std::size_t SplitSelection::piece_count() const noexcept {
  std::size_t n = 0;
  for (const auto& c : pieces_) n += c.size();
  return n;
}

Eigen::VectorXd SplitSelection::average(std::size_t cell) const {
  Eigen::VectorXd avg = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim_));
  for (const SplitPiece& p : pieces_.at(cell)) avg += p.fraction * p.value;
  return avg;
}

StepFunction SplitSelection::averages() const {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(pieces_.size()), static_cast<Eigen::Index>(dim_));
  for (std::size_t k = 0; k < pieces_.size(); ++k)
    m.row(static_cast<Eigen::Index>(k)) = average(k).transpose();
  return StepFunction(std::move(m));
}

CandidateField::CandidateField(std::vector<std::vector<Eigen::VectorXd>> sets)
    : sets_(std::move(sets)) {
  for (std::size_t k = 0; k < sets_.size(); ++k) {
    if (sets_[k].empty()) throw InvalidInput(fmt::format("candidate set of cell {} is empty", k));
  }
}

}  // namespace smpe
