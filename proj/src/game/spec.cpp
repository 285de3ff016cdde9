#include "smpe/game/spec.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "smpe/errors.hpp"

namespace smpe {

KernelDecomposition::KernelDecomposition(std::size_t j, std::size_t coarse, std::size_t states,
                                         std::size_t profiles, std::size_t cells)
    : components(j),
      coarse_cells(coarse),
      states(states),
      profiles(profiles),
      rho(j, std::vector<double>(cells, 0.0)),
      q(j * coarse * states * profiles, 0.0) {}

ProfileSpace StochasticGameSpec::profile_space() const {
  std::vector<std::size_t> counts;
  counts.reserve(actions.size());
  for (const auto& labels : actions) counts.push_back(labels.size());
  return ProfileSpace(std::move(counts));
}

std::size_t StochasticGameSpec::profile_count() const {
  std::size_t n = 1;
  for (const auto& labels : actions) n *= labels.size();
  return n;
}

double StochasticGameSpec::max_discount() const {
  return discounts.empty() ? 0.0 : *std::max_element(discounts.begin(), discounts.end());
}

bool StochasticGameSpec::feasible_profile(std::size_t s, std::size_t x) const {
  const ProfileSpace ps = profile_space();
  for (std::size_t i = 0; i < players(); ++i) {
    const auto& allowed = feasible[s][i];
    if (std::find(allowed.begin(), allowed.end(), ps.action_of(x, i)) == allowed.end()) return false;
  }
  return true;
}

std::vector<std::size_t> StochasticGameSpec::feasible_profiles(std::size_t s) const {
  std::vector<std::size_t> out;
  for (std::size_t x = 0; x < profile_count(); ++x)
    if (feasible_profile(s, x)) out.push_back(x);
  return out;
}

double StochasticGameSpec::decomposed_mass(std::size_t target, std::size_t s, std::size_t x) const {
  const std::size_t e = space.coarse_of(target);
  double density = 0.0;
  for (std::size_t j = 0; j < kernel.components; ++j)
    density += kernel.at(j, e, s, x) * kernel.rho[j][target];
  return density * space.mass(target);
}

double StochasticGameSpec::total_mass(std::size_t s, std::size_t x) const {
  double total = 0.0;
  for (std::size_t e = 0; e < space.coarse_count(); ++e) {
    for (std::size_t j = 0; j < kernel.components; ++j) {
      double weight = 0.0;
      for (std::size_t k : space.members(e)) weight += space.mass(k) * kernel.rho[j][k];
      total += kernel.at(j, e, s, x) * weight;
    }
  }
  for (std::size_t a = 0; a < atom_kernel.atoms; ++a) total += atom_kernel.at(a, s, x);
  return total;
}

StochasticGameSpec make_blank_game(std::vector<double> discounts,
                                   std::vector<std::vector<std::string>> actions,
                                   double payoff_bound, GridSpace space, std::size_t components) {
  StochasticGameSpec spec;
  spec.discounts = std::move(discounts);
  spec.actions = std::move(actions);
  spec.payoff_bound = payoff_bound;
  spec.space = std::move(space);
  const std::size_t n = spec.space.size();
  const std::size_t m = spec.players();
  const std::size_t profiles = spec.profile_count();
  spec.feasible.assign(n, std::vector<std::vector<std::size_t>>(m));
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t a = 0; a < spec.actions[i].size(); ++a) spec.feasible[s][i].push_back(a);
    }
  }
  spec.payoffs.assign(n * profiles * m, 0.0);
  spec.kernel = KernelDecomposition(components, spec.space.coarse_count(), n, profiles, n);
  spec.atom_kernel = AtomKernel(spec.space.atomic_cells().size(), n, profiles);
  return spec;
}

void require_consistent_dimensions(const StochasticGameSpec& spec) {
  const std::size_t m = spec.players();
  const std::size_t n = spec.states();
  if (m == 0) throw InvalidInput("game has no players");
  if (spec.actions.size() != m) {
    throw InvalidInput(fmt::format("{} discount factors but {} action lists", m, spec.actions.size()));
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (spec.actions[i].empty()) throw InvalidInput(fmt::format("player {} has no actions", i));
  }
  const std::size_t profiles = spec.profile_count();
  if (spec.feasible.size() != n) throw InvalidInput("feasible sets do not cover every state");
  for (std::size_t s = 0; s < n; ++s) {
    if (spec.feasible[s].size() != m) {
      throw InvalidInput(fmt::format("state {} has feasible sets for {} players", s,
                                     spec.feasible[s].size()));
    }
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t a : spec.feasible[s][i]) {
        if (a >= spec.actions[i].size()) {
          throw InvalidInput(fmt::format("state {} player {} lists unknown action {}", s, i, a));
        }
      }
    }
  }
  if (spec.payoffs.size() != n * profiles * m) {
    throw InvalidInput(fmt::format("payoff table has {} entries, expected {}", spec.payoffs.size(),
                                   n * profiles * m));
  }
  const KernelDecomposition& k = spec.kernel;
  if (k.components == 0) throw InvalidInput("kernel has no components");
  if (k.coarse_cells != spec.space.coarse_count() || k.states != n || k.profiles != profiles) {
    throw InvalidInput("kernel dimensions do not match the game");
  }
  if (k.rho.size() != k.components) throw InvalidInput("kernel has wrong number of densities");
  for (const auto& r : k.rho) {
    if (r.size() != n) throw InvalidInput("kernel density does not cover every cell");
  }
  if (k.q.size() != k.components * k.coarse_cells * n * profiles) {
    throw InvalidInput("kernel table has wrong size");
  }
  const AtomKernel& a = spec.atom_kernel;
  if (a.atoms != spec.space.atomic_cells().size() || a.states != n || a.profiles != profiles ||
      a.mass.size() != a.atoms * n * profiles) {
    throw InvalidInput("atom kernel dimensions do not match the game");
  }
}

}  // namespace smpe
