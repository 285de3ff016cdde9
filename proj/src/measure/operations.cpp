#include "smpe/measure/operations.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "smpe/errors.hpp"
#include "smpe/measure/convex_hull.hpp"

namespace smpe {

StepFunction conditional_expectation(const StepFunction& f, const GridSpace& space) {
  if (f.size() != space.size()) {
    throw InvalidInput(
        fmt::format("step function has {} cells, space has {}", f.size(), space.size()));
  }
  Eigen::MatrixXd out(f.values().rows(), f.values().cols());
  for (std::size_t e = 0; e < space.coarse_count(); ++e) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(f.values().cols());
    double mass = 0.0;
    for (std::size_t k : space.members(e)) {
      sum += space.mass(k) * f.at(k);
      mass += space.mass(k);
    }
    const Eigen::VectorXd avg = mass > 0.0 ? Eigen::VectorXd(sum / mass)
                                           : Eigen::VectorXd::Zero(f.values().cols());
    for (std::size_t k : space.members(e)) out.row(static_cast<Eigen::Index>(k)) = avg.transpose();
  }
  return StepFunction(std::move(out));
}

namespace {

void check_portion(std::span<const CellPortion> set, const GridSpace& space) {
  for (const CellPortion& p : set) {
    if (p.cell >= space.size()) throw InvalidInput(fmt::format("cell {} out of range", p.cell));
    if (!std::isfinite(p.mass) || p.mass < 0.0) {
      throw InvalidInput(fmt::format("cell {} has invalid retained mass {}", p.cell, p.mass));
    }
    if (p.mass > space.mass(p.cell) * (1.0 + 1e-12)) {
      throw InvalidInput(fmt::format("cell {} retains {} out of {}", p.cell, p.mass,
                                     space.mass(p.cell)));
    }
  }
}

}  // namespace

GAtomCheck is_g_atom(std::span<const CellPortion> set, const GridSpace& space) {
  check_portion(set, space);
  double total = 0.0;
  for (const CellPortion& p : set) total += p.mass;
  if (!(total > 0.0)) return {false, true};

  std::vector<std::size_t> atoms_per_coarse(space.coarse_count(), 0);
  for (const CellPortion& p : set) {
    if (p.mass <= 0.0) continue;
    if (space.divisible(p.cell)) return {false, false};
    if (++atoms_per_coarse[space.coarse_of(p.cell)] > 1) return {false, false};
  }
  return {true, false};
}

std::vector<double> coarse_masses(std::span<const CellPortion> set, const GridSpace& space) {
  check_portion(set, space);
  std::vector<double> out(space.coarse_count(), 0.0);
  for (const CellPortion& p : set) out[space.coarse_of(p.cell)] += p.mass;
  return out;
}

std::vector<double> coarse_masses(std::span<const double> cell_masses, const GridSpace& space) {
  if (cell_masses.size() != space.size()) throw InvalidInput("cell mass vector size mismatch");
  std::vector<double> out(space.coarse_count(), 0.0);
  for (std::size_t k = 0; k < cell_masses.size(); ++k) out[space.coarse_of(k)] += cell_masses[k];
  return out;
}

HalfSplit half_split(std::span<const CellPortion> set, const GridSpace& space) {
  check_portion(set, space);
  std::vector<double> retained(space.size(), 0.0);
  for (const CellPortion& p : set) {
    if (p.mass > 0.0 && !space.divisible(p.cell)) {
      throw AtomicMass(fmt::format("cell {} is an atom holding mass {} of the set", p.cell, p.mass));
    }
    retained[p.cell] += p.mass;
  }

  HalfSplit out;
  out.half_mass.assign(space.size(), 0.0);
  std::vector<std::vector<SplitPiece>> pieces(space.size());
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  for (std::size_t k = 0; k < space.size(); ++k) {
    const double cell_mass = space.mass(k);
    if (retained[k] > 0.0 && cell_mass > 0.0) {
      out.half_mass[k] = 0.5 * retained[k];
      const double inside = std::min(1.0, out.half_mass[k] / cell_mass);
      pieces[k].push_back({inside, one, 1});
      if (inside < 1.0) pieces[k].push_back({1.0 - inside, zero, 0});
    } else {
      pieces[k].push_back({1.0, zero, 0});
    }
  }
  out.indicator = SplitSelection(space, std::move(pieces));
  return out;
}

namespace {

void check_purify_inputs(const StepFunction& vprime, const CandidateField& candidates,
                         std::span<const StepFunction> moments, const GridSpace& space) {
  const std::size_t n = space.size();
  if (vprime.size() != n) throw InvalidInput("target has wrong number of cells");
  if (candidates.size() != n) throw InvalidInput("candidate field has wrong number of cells");
  for (std::size_t k = 0; k < n; ++k) {
    for (const auto& c : candidates.at(k)) {
      if (static_cast<std::size_t>(c.size()) != vprime.dim()) {
        throw InvalidInput(fmt::format("candidate on cell {} has dimension {}, expected {}", k,
                                       c.size(), vprime.dim()));
      }
    }
  }
  for (std::size_t j = 0; j < moments.size(); ++j) {
    const StepFunction& rho = moments[j];
    if (rho.size() != n || rho.dim() != 1) {
      throw InvalidInput(fmt::format("moment {} is not a scalar step function on the space", j));
    }
    if ((rho.values().array() < 0.0).any()) {
      throw InvalidInput(fmt::format("moment {} takes negative values", j));
    }
  }
}

// Joint matching of the positive-mass atoms of one coarse cell. Returns the
// chosen candidate index per atom or throws NoSelection.
std::vector<std::size_t> match_atoms(const std::vector<std::size_t>& atoms,
                                     const StepFunction& vprime,
                                     const CandidateField& candidates,
                                     std::span<const StepFunction> moments,
                                     const GridSpace& space, std::size_t coarse,
                                     const PurifyOptions& options) {
  const auto dim = static_cast<Eigen::Index>(vprime.dim());
  const auto nmom = static_cast<Eigen::Index>(moments.size());

  // weight(a, j) = mass * rho_j on atom a
  Eigen::MatrixXd weight(static_cast<Eigen::Index>(atoms.size()), nmom);
  Eigen::MatrixXd target = Eigen::MatrixXd::Zero(nmom, dim);
  double assignments = 1.0;
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    const std::size_t k = atoms[a];
    for (Eigen::Index j = 0; j < nmom; ++j) {
      weight(static_cast<Eigen::Index>(a), j) =
          space.mass(k) * moments[static_cast<std::size_t>(j)].scalar_at(k);
      target.row(j) += weight(static_cast<Eigen::Index>(a), j) * vprime.at(k).transpose();
    }
    assignments *= static_cast<double>(candidates.at(k).size());
  }
  if (assignments > static_cast<double>(options.max_assignments)) {
    throw InvalidInput(fmt::format("coarse cell {} needs {:.0f} atom assignments, limit is {}",
                                   coarse, assignments, options.max_assignments));
  }

  std::vector<std::size_t> choice(atoms.size(), 0);
  while (true) {
    Eigen::MatrixXd achieved = Eigen::MatrixXd::Zero(nmom, dim);
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      const Eigen::VectorXd& value = candidates.at(atoms[a])[choice[a]];
      for (Eigen::Index j = 0; j < nmom; ++j)
        achieved.row(j) += weight(static_cast<Eigen::Index>(a), j) * value.transpose();
    }
    if (nmom == 0 || (achieved - target).lpNorm<Eigen::Infinity>() <= options.moment_tol) {
      return choice;
    }
    // odometer, last atom fastest
    std::size_t pos = atoms.size();
    while (pos > 0) {
      --pos;
      if (++choice[pos] < candidates.at(atoms[pos]).size()) break;
      choice[pos] = 0;
      if (pos == 0) {
        throw NoSelection(fmt::format(
            "no assignment of candidates to the {} atom(s) of coarse cell {} matches the target "
            "moments",
            atoms.size(), coarse));
      }
    }
    if (atoms.empty()) break;
  }
  throw NoSelection(fmt::format("coarse cell {} admits no selection", coarse));
}

}  // namespace

SplitSelection purify_selection(const StepFunction& vprime, const CandidateField& candidates,
                                std::span<const StepFunction> moments, const GridSpace& space,
                                const PurifyOptions& options) {
  check_purify_inputs(vprime, candidates, moments, space);
  const std::size_t n = space.size();
  std::vector<std::vector<SplitPiece>> pieces(n);
  std::vector<bool> unresolved_coarse(space.coarse_count(), false);

  for (std::size_t k = 0; k < n; ++k) {
    const auto& cands = candidates.at(k);
    const Eigen::VectorXd target = vprime.at(k);
    if (space.divisible(k)) {
      auto combo = caratheodory_weights(cands, target, options.hull_tol);
      if (!combo) {
        throw InvalidInput(
            fmt::format("target on divisible cell {} lies outside the candidate hull", k));
      }
      for (std::size_t s = 0; s < combo->support.size(); ++s) {
        if (combo->weights[s] > 0.0)
          pieces[k].push_back({combo->weights[s], cands[combo->support[s]], combo->support[s]});
      }
      continue;
    }
    // atomic cell: a single candidate, preferably vprime itself
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < cands.size(); ++c) {
      const double d = (cands[c] - target).lpNorm<Eigen::Infinity>();
      if (d < best_dist) {
        best_dist = d;
        best = c;
      }
    }
    if (space.mass(k) > 0.0 && best_dist > options.hull_tol) {
      unresolved_coarse[space.coarse_of(k)] = true;
    }
    pieces[k].push_back({1.0, cands[best], best});
  }

  for (std::size_t e = 0; e < space.coarse_count(); ++e) {
    if (!unresolved_coarse[e]) continue;
    std::vector<std::size_t> atoms;
    for (std::size_t k : space.members(e))
      if (!space.divisible(k) && space.mass(k) > 0.0) atoms.push_back(k);
    const auto choice = match_atoms(atoms, vprime, candidates, moments, space, e, options);
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      const std::size_t k = atoms[a];
      pieces[k].front() = {1.0, candidates.at(k)[choice[a]], choice[a]};
    }
  }
  return SplitSelection(space, std::move(pieces));
}

Eigen::MatrixXd coarse_moments(const SplitSelection& value, const StepFunction& rho,
                               const GridSpace& space) {
  return coarse_moments(value.averages(), rho, space);
}

Eigen::MatrixXd coarse_moments(const StepFunction& value, const StepFunction& rho,
                               const GridSpace& space) {
  if (value.size() != space.size() || rho.size() != space.size() || rho.dim() != 1) {
    throw InvalidInput("moment inputs do not match the space");
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(space.coarse_count()),
                                              static_cast<Eigen::Index>(value.dim()));
  for (std::size_t k = 0; k < space.size(); ++k) {
    out.row(static_cast<Eigen::Index>(space.coarse_of(k))) +=
        space.mass(k) * rho.scalar_at(k) * value.at(k).transpose();
  }
  return out;
}

}  // namespace smpe
