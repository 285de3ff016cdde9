#include "smpe/stage/stage_game.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "smpe/errors.hpp"

namespace smpe {

double AggregateVector::distance(const AggregateVector& other) const {
  if (values.size() != other.values.size()) throw InvalidInput("aggregate dimensions differ");
  double d = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) d = std::max(d, std::abs(values[k] - other.values[k]));
  return d;
}

AggregateVector aggregate(const Eigen::MatrixXd& cell_values, const StochasticGameSpec& spec) {
  const std::size_t m = spec.players();
  if (static_cast<std::size_t>(cell_values.rows()) != spec.states() ||
      static_cast<std::size_t>(cell_values.cols()) != m) {
    throw InvalidInput("cell value table does not match the game");
  }
  const KernelDecomposition& kd = spec.kernel;
  AggregateVector c(m, kd.components, kd.coarse_cells);
  for (std::size_t k = 0; k < spec.states(); ++k) {
    const std::size_t e = spec.space.coarse_of(k);
    const double mass = spec.space.mass(k);
    for (std::size_t j = 0; j < kd.components; ++j) {
      const double w = mass * kd.rho[j][k];
      if (w == 0.0) continue;
      for (std::size_t i = 0; i < m; ++i)
        c.at(i, j, e) += w * cell_values(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i));
    }
  }
  return c;
}

StageGame::StageGame(std::vector<std::vector<std::size_t>> acts, Eigen::MatrixXd pay)
    : actions(std::move(acts)), payoff(std::move(pay)) {
  std::vector<std::size_t> counts;
  for (const auto& a : actions) counts.push_back(a.size());
  profiles = ProfileSpace(std::move(counts));
  if (static_cast<std::size_t>(payoff.rows()) != profiles.size() ||
      static_cast<std::size_t>(payoff.cols()) != actions.size()) {
    throw InvalidInput(fmt::format("stage payoff table is {}x{}, expected {}x{}", payoff.rows(),
                                   payoff.cols(), profiles.size(), actions.size()));
  }
}

std::size_t global_profile(const StageGame& g, const ProfileSpace& global, std::size_t local) {
  std::size_t x = 0;
  for (std::size_t i = 0; i < g.players(); ++i)
    x = global.with_action(x, i, g.actions[i][g.profiles.action_of(local, i)]);
  return x;
}

StageGame build_stage_game(const StochasticGameSpec& spec, std::size_t state,
                           const AggregateVector& c, const Eigen::MatrixXd& v2) {
  const std::size_t m = spec.players();
  const KernelDecomposition& kd = spec.kernel;
  const AtomKernel& ak = spec.atom_kernel;
  if (state >= spec.states()) throw InvalidInput(fmt::format("state {} out of range", state));
  if (c.players != m || c.components != kd.components || c.coarse_cells != kd.coarse_cells) {
    throw InvalidInput("aggregate vector does not match the game");
  }
  if (static_cast<std::size_t>(v2.rows()) != ak.atoms || static_cast<std::size_t>(v2.cols()) != m) {
    throw InvalidInput("atom value table does not match the game");
  }

  StageGame g;
  g.actions = spec.feasible[state];
  std::vector<std::size_t> counts;
  for (const auto& a : g.actions) counts.push_back(a.size());
  g.profiles = ProfileSpace(std::move(counts));
  g.payoff.resize(static_cast<Eigen::Index>(g.profiles.size()), static_cast<Eigen::Index>(m));

  const ProfileSpace global = spec.profile_space();
  for (std::size_t local = 0; local < g.profiles.size(); ++local) {
    const std::size_t x = global_profile(g, global, local);
    for (std::size_t i = 0; i < m; ++i) {
      double cont = 0.0;
      for (std::size_t j = 0; j < kd.components; ++j)
        for (std::size_t e = 0; e < kd.coarse_cells; ++e) cont += kd.at(j, e, state, x) * c.at(i, j, e);
      for (std::size_t a = 0; a < ak.atoms; ++a)
        cont += v2(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(i)) * ak.at(a, state, x);
      const double b = spec.discounts[i];
      g.payoff(static_cast<Eigen::Index>(local), static_cast<Eigen::Index>(i)) =
          (1.0 - b) * spec.payoff(state, x, i) + b * cont;
    }
  }
  return g;
}

namespace {

// Probability of local profile x under a product mix.
double profile_probability(const StageGame& g, const std::vector<Eigen::VectorXd>& strategy,
                           std::size_t x) {
  double p = 1.0;
  for (std::size_t i = 0; i < g.players() && p != 0.0; ++i)
    p *= strategy[i](static_cast<Eigen::Index>(g.profiles.action_of(x, i)));
  return p;
}

void require_strategy(const StageGame& g, const std::vector<Eigen::VectorXd>& strategy) {
  if (strategy.size() != g.players()) throw InvalidInput("strategy has wrong number of players");
  for (std::size_t i = 0; i < g.players(); ++i) {
    if (static_cast<std::size_t>(strategy[i].size()) != g.actions[i].size()) {
      throw InvalidInput(fmt::format("strategy of player {} has wrong length", i));
    }
  }
}

}  // namespace

Eigen::VectorXd expected_payoff(const StageGame& g, const std::vector<Eigen::VectorXd>& strategy) {
  require_strategy(g, strategy);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.players()));
  for (std::size_t x = 0; x < g.profiles.size(); ++x) {
    const double p = profile_probability(g, strategy, x);
    if (p != 0.0) out += p * g.payoff.row(static_cast<Eigen::Index>(x)).transpose();
  }
  return out;
}

Eigen::VectorXd action_values(const StageGame& g, const std::vector<Eigen::VectorXd>& strategy,
                              std::size_t player) {
  require_strategy(g, strategy);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.actions[player].size()));
  const auto col = static_cast<Eigen::Index>(player);
  for (std::size_t x = 0; x < g.profiles.size(); ++x) {
    double p = 1.0;
    for (std::size_t i = 0; i < g.players() && p != 0.0; ++i)
      if (i != player) p *= strategy[i](static_cast<Eigen::Index>(g.profiles.action_of(x, i)));
    if (p == 0.0) continue;
    out(static_cast<Eigen::Index>(g.profiles.action_of(x, player))) +=
        p * g.payoff(static_cast<Eigen::Index>(x), col);
  }
  return out;
}

}  // namespace smpe
