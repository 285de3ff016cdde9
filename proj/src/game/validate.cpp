#include "smpe/game/validate.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "smpe/measure/operations.hpp"

namespace smpe {

namespace {
constexpr double kNormalizationTol = 1e-9;
}

bool ValidationReport::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::summary() const {
  if (violations.empty()) return "valid";
  std::string out = fmt::format("{} violation(s):", violations.size());
  for (const Violation& v : violations) out += "\n  " + v.message;
  return out;
}

ValidationReport validate_game(const StochasticGameSpec& spec) {
  ValidationReport report;
  auto add = [&](ViolationKind kind, std::string msg) {
    report.violations.push_back({kind, std::move(msg)});
  };
  try {
    require_consistent_dimensions(spec);
  } catch (const InvalidInput& e) {
    add(ViolationKind::Dimension, e.what());
    report.no_g_atom = false;
    return report;
  }

  const std::size_t m = spec.players();
  const std::size_t n = spec.states();
  const std::size_t profiles = spec.profile_count();

  for (std::size_t i = 0; i < m; ++i) {
    const double b = spec.discounts[i];
    if (!std::isfinite(b) || b < 0.0 || b >= 1.0) {
      add(ViolationKind::Discount, fmt::format("discount of player {} is {}, outside [0,1)", i, b));
    }
  }
  if (!std::isfinite(spec.payoff_bound) || spec.payoff_bound <= 0.0) {
    add(ViolationKind::PayoffBound, fmt::format("payoff bound {} is not positive", spec.payoff_bound));
  }

  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t i = 0; i < m; ++i) {
      if (spec.feasible[s][i].empty()) {
        add(ViolationKind::EmptyFeasibleSet,
            fmt::format("empty feasible set for player {} at state {}", i, s));
      }
    }
  }

  std::size_t bound_failures = 0;
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t x : spec.feasible_profiles(s)) {
      for (std::size_t i = 0; i < m; ++i) {
        const double u = spec.payoff(s, x, i);
        if (!std::isfinite(u)) {
          add(ViolationKind::NonFinite, fmt::format("non-finite payoff at state {}, profile {}", s, x));
        } else if (std::abs(u) > spec.payoff_bound && bound_failures++ == 0) {
          add(ViolationKind::PayoffBound,
              fmt::format("payoff {} of player {} at state {}, profile {} exceeds bound {}", u, i, s,
                          x, spec.payoff_bound));
        }
      }
    }
  }

  bool negative = false;
  bool non_finite = false;
  auto scan = [&](double v) {
    if (!std::isfinite(v)) non_finite = true;
    else if (v < 0.0) negative = true;
  };
  for (const auto& r : spec.kernel.rho) std::for_each(r.begin(), r.end(), scan);
  std::for_each(spec.kernel.q.begin(), spec.kernel.q.end(), scan);
  std::for_each(spec.atom_kernel.mass.begin(), spec.atom_kernel.mass.end(), scan);
  if (negative) add(ViolationKind::NegativeKernel, "negative kernel component");
  if (non_finite) add(ViolationKind::NonFinite, "non-finite kernel component");

  if (!non_finite) {
    std::size_t reported = 0;
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t x = 0; x < profiles; ++x) {
        if (!spec.feasible_profile(s, x)) continue;
        const double total = spec.total_mass(s, x);
        if (std::abs(total - 1.0) > kNormalizationTol && reported++ < 8) {
          add(ViolationKind::Normalization,
              fmt::format("normalization {:.12g} ≠ 1 at state {}, profile {}", total, s, x));
        }
      }
    }
  }

  // A positive-mass atom reached through rho is a coarse atom of the atomless part.
  for (std::size_t k : spec.space.atomic_cells()) {
    const CellPortion single{k, spec.space.mass(k)};
    if (!is_g_atom(std::span(&single, 1), spec.space).atom) continue;
    for (std::size_t j = 0; j < spec.kernel.components; ++j) {
      if (spec.kernel.rho[j][k] != 0.0) report.no_g_atom = false;
    }
  }
  return report;
}

std::vector<std::size_t> sunspot_parents(const GridSpace& space, std::size_t sunspot_cells) {
  std::vector<std::size_t> parent;
  for (std::size_t k = 0; k < space.size(); ++k) {
    const std::size_t copies = space.divisible(k) ? sunspot_cells : 1;
    for (std::size_t l = 0; l < copies; ++l) parent.push_back(k);
  }
  return parent;
}

StochasticGameSpec sunspot_extend(const StochasticGameSpec& spec, std::size_t sunspot_cells) {
  require_consistent_dimensions(spec);
  if (sunspot_cells < 2) throw InvalidInput("a sunspot needs at least two cells");
  if (spec.space.divisible_cells().empty()) {
    throw InvalidInput("game has no divisible cell to extend");
  }

  const std::vector<std::size_t> parent = sunspot_parents(spec.space, sunspot_cells);
  const std::size_t n_new = parent.size();
  std::vector<Cell> cells;
  std::vector<std::size_t> coarse;
  cells.reserve(n_new);
  for (std::size_t s = 0; s < n_new; ++s) {
    const Cell& c = spec.space.cell(parent[s]);
    cells.push_back(c.divisible ? Cell{c.mass / static_cast<double>(sunspot_cells), true} : c);
    coarse.push_back(parent[s]);
  }

  StochasticGameSpec out = make_blank_game(spec.discounts, spec.actions, spec.payoff_bound,
                                           GridSpace(std::move(cells), std::move(coarse)), 1);
  const std::size_t m = spec.players();
  const std::size_t profiles = spec.profile_count();
  const std::size_t n_old = spec.states();

  for (std::size_t k = 0; k < n_new; ++k)
    out.kernel.rho[0][k] = spec.space.divisible(parent[k]) ? 1.0 : 0.0;

  for (std::size_t s = 0; s < n_new; ++s) {
    const std::size_t ps = parent[s];
    out.feasible[s] = spec.feasible[ps];
    for (std::size_t x = 0; x < profiles; ++x) {
      for (std::size_t i = 0; i < m; ++i) out.payoff(s, x, i) = spec.payoff(ps, x, i);
      // new coarse cell e is old fine cell e
      for (std::size_t e = 0; e < n_old; ++e) {
        if (!spec.space.divisible(e)) continue;
        double density = 0.0;
        for (std::size_t j = 0; j < spec.kernel.components; ++j)
          density += spec.kernel.at(j, spec.space.coarse_of(e), ps, x) * spec.kernel.rho[j][e];
        out.kernel.at(0, e, s, x) = density;
      }
      for (std::size_t a = 0; a < spec.atom_kernel.atoms; ++a)
        out.atom_kernel.at(a, s, x) = spec.atom_kernel.at(a, ps, x);
    }
  }
  return out;
}

}  // namespace smpe
