#pragma once

#include <string>
#include <vector>

#include "smpe/errors.hpp"
#include "smpe/game/spec.hpp"

namespace smpe {

enum class ViolationKind {
  Dimension,
  NonFinite,
  Discount,
  PayoffBound,
  EmptyFeasibleSet,
  NegativeKernel,
  Normalization,
};

struct Violation {
  ViolationKind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  /// The decomposed kernel puts no density on positive-mass atoms, so the
  /// atomless part has no coarse atom.
  bool no_g_atom = true;

  bool ok() const noexcept { return violations.empty(); }
  bool has(ViolationKind kind) const;
  std::string summary() const;
};

/// Checks the structural invariants of a game: discounts in [0,1), payoffs
/// bounded by C, nonempty feasible sets, nonnegative kernel components, and
/// total transition probability 1 (within 1e-9) at every state and feasible
/// profile.
ValidationReport validate_game(const StochasticGameSpec& spec);

class ValidationError : public Error {
 public:
  explicit ValidationError(ValidationReport report)
      : Error(report.summary()), report_(std::move(report)) {}
  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

/// Product game on S x L with L split into `sunspot_cells` equal divisible
/// pieces. Every divisible cell becomes `sunspot_cells` sub-cells sharing one
/// coarse cell; atomic cells are kept as they are and form their own coarse
/// cells. Payoffs, feasibility and transition densities are copied from the
/// parent cell, so the new kernel is constant within coarse cells (one
/// component, rho = 1). Throws InvalidInput if sunspot_cells < 2 or the game
/// has no divisible cell.
StochasticGameSpec sunspot_extend(const StochasticGameSpec& spec, std::size_t sunspot_cells);

/// Parent cell of every state of the sunspot extension.
std::vector<std::size_t> sunspot_parents(const GridSpace& space, std::size_t sunspot_cells);

}  // namespace smpe
