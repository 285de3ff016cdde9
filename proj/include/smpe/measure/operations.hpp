#pragma once

#include <span>
#include <vector>

#include "smpe/measure/grid_space.hpp"
#include "smpe/measure/selection.hpp"

namespace smpe {

/// Conditional expectation onto the coarse partition: on every coarse cell E
/// the mass-weighted average of `f` over E. Zero-mass coarse cells map to 0.
StepFunction conditional_expectation(const StepFunction& f, const GridSpace& space);

/// Verdict of the G-atom test.
struct GAtomCheck {
  bool atom = false;
  /// Set when the portion has zero mass, so the positivity clause fails.
  bool null_set = false;
};

/// A set D (given as retained masses per cell) is a G-atom when it has
/// positive mass, holds no divisible mass, and no two positive-mass atomic
/// cells of D share a coarse cell. On such a set every measurable subset
/// coincides with the trace of a coarse set.
GAtomCheck is_g_atom(std::span<const CellPortion> set, const GridSpace& space);

/// Result of halving a set within every coarse cell.
struct HalfSplit {
  /// Indicator of D0: value 1 on the carved-out fraction of each cell, 0 elsewhere.
  SplitSelection indicator;
  /// Mass of D0 on each fine cell (half of the retained mass).
  std::vector<double> half_mass;
};

/// Carves D0 out of D with mass(D0 ∩ E) = mass(D ∩ E) / 2 for every coarse
/// cell E by taking half of each cell's retained mass. Throws AtomicMass when
/// D holds positive mass on an atomic cell, InvalidInput when a retained mass
/// is negative or exceeds its cell.
HalfSplit half_split(std::span<const CellPortion> set, const GridSpace& space);

/// Per coarse cell, the total mass of the portion.
std::vector<double> coarse_masses(std::span<const CellPortion> set, const GridSpace& space);
std::vector<double> coarse_masses(std::span<const double> cell_masses, const GridSpace& space);

struct PurifyOptions {
  /// Distance from the convex hull tolerated on divisible cells.
  double hull_tol = 1e-9;
  /// Tolerance on aggregate moments when atoms are matched jointly.
  double moment_tol = 1e-10;
  /// Upper bound on candidate assignments tried per coarse cell.
  std::size_t max_assignments = std::size_t{1} << 22;
};

/// Replaces a selection `vprime` of the convexified candidate field by a
/// selection of the candidate field itself with identical moments
///
///     sum_{k in E} mass_k * rho_j(k) * <v*>_k  ==  sum_{k in E} mass_k * rho_j(k) * vprime_k
///
/// for every coarse cell E and moment j (each moment is a scalar step function).
///
/// Divisible cells are split into at most dim+1 sub-intervals whose fractions
/// are convex weights reproducing vprime on that cell. Atomic cells cannot be
/// split: each must carry a single candidate, and the atoms of a coarse cell
/// are matched jointly by exhaustive search when vprime is not itself a
/// candidate. Returns pieces tagged with candidate indices. Divisible cells
/// always keep vprime's cell average and never absorb an atomic mismatch, so
/// in a coarse cell mixing atoms with divisible cells whose hull has room to
/// move the NoSelection verdict can be conservative.
///
/// Throws InvalidInput if vprime lies outside the hull on a divisible cell,
/// NoSelection if the atomic cells admit no matching assignment.
SplitSelection purify_selection(const StepFunction& vprime, const CandidateField& candidates,
                                std::span<const StepFunction> moments, const GridSpace& space,
                                const PurifyOptions& options = {});

/// Integral of value * rho over each coarse cell, per component of the value.
/// Result(E, d) = sum_{k in E} mass_k * rho(k) * avg_k[d].
Eigen::MatrixXd coarse_moments(const SplitSelection& value, const StepFunction& rho,
                               const GridSpace& space);
Eigen::MatrixXd coarse_moments(const StepFunction& value, const StepFunction& rho,
                               const GridSpace& space);

}  // namespace smpe
