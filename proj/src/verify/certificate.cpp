#include "smpe/verify/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>
#include <fmt/format.h>

#include "smpe/errors.hpp"
#include "smpe/verify/transitions.hpp"

namespace smpe {

void require_result_fits(const EquilibriumResult& result, const StochasticGameSpec& spec) {
  const std::size_t n = spec.states();
  const std::size_t m = spec.players();
  if (result.value.size() != n || result.strategy.size() != n) {
    throw InvalidInput(fmt::format("result covers {} cells, game has {}", result.value.size(), n));
  }
  if (result.value.dim() != m) throw InvalidInput("result values have wrong dimension");
  for (std::size_t k = 0; k < n; ++k) {
    if (result.strategy[k].size() != result.value.pieces(k).size()) {
      throw InvalidInput(fmt::format("cell {} has {} strategies for {} pieces", k,
                                     result.strategy[k].size(), result.value.pieces(k).size()));
    }
    for (const MixedProfile& f : result.strategy[k]) {
      if (f.size() != m) throw InvalidInput(fmt::format("cell {} strategy has wrong player count", k));
      for (std::size_t i = 0; i < m; ++i) {
        if (static_cast<std::size_t>(f[i].size()) != spec.actions[i].size()) {
          throw InvalidInput(fmt::format("cell {} player {} strategy has wrong length", k, i));
        }
        double total = 0.0;
        for (Eigen::Index a = 0; a < f[i].size(); ++a) {
          const double p = f[i](a);
          if (!std::isfinite(p) || p < 0.0) {
            throw InvalidInput(fmt::format("cell {} player {} has invalid probability {}", k, i, p));
          }
          const auto& allowed = spec.feasible[k][i];
          if (p > 0.0 && std::find(allowed.begin(), allowed.end(), static_cast<std::size_t>(a)) ==
                             allowed.end()) {
            throw InvalidInput(fmt::format("cell {} player {} plays infeasible action {}", k, i, a));
          }
          total += p;
        }
        if (std::abs(total - 1.0) > 1e-9) {
          throw InvalidInput(fmt::format("cell {} player {} probabilities sum to {}", k, i, total));
        }
      }
    }
  }
}

TransitionTable::TransitionTable(const StochasticGameSpec& spec)
    : states(spec.states()), profiles(spec.profile_count()), mass(states * profiles * states, 0.0) {
  const std::vector<std::size_t> atoms = spec.atoms();
  for (std::size_t s = 0; s < states; ++s) {
    for (std::size_t x = 0; x < profiles; ++x) {
      double* row = &mass[(s * profiles + x) * states];
      for (std::size_t k = 0; k < states; ++k) row[k] = spec.decomposed_mass(k, s, x);
      for (std::size_t a = 0; a < atoms.size(); ++a) row[atoms[a]] += spec.atom_kernel.at(a, s, x);
    }
  }
}

namespace {

// Probability that the others play their part of profile x.
double others_probability(const MixedProfile& f, const ProfileSpace& ps, std::size_t x,
                          std::size_t skip) {
  double p = 1.0;
  for (std::size_t j = 0; j < f.size() && p != 0.0; ++j)
    if (j != skip) p *= f[j](static_cast<Eigen::Index>(ps.action_of(x, j)));
  return p;
}

}  // namespace

Certificate deviation_residual(const EquilibriumResult& result, const StochasticGameSpec& spec) {
  require_consistent_dimensions(spec);
  require_result_fits(result, spec);
  const std::size_t n = spec.states();
  const std::size_t m = spec.players();
  const std::size_t profiles = spec.profile_count();
  const ProfileSpace ps = spec.profile_space();
  const TransitionTable table(spec);

  // Expected continuation of every player after (s, x) under the reported value.
  Eigen::MatrixXd avg(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (std::size_t k = 0; k < n; ++k) avg.row(static_cast<Eigen::Index>(k)) = result.value.average(k).transpose();
  std::vector<double> cont(n * profiles * m, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t x = 0; x < profiles; ++x) {
      const double* row = table.row(s, x);
      for (std::size_t k = 0; k < n; ++k) {
        if (row[k] == 0.0) continue;
        for (std::size_t i = 0; i < m; ++i)
          cont[(s * profiles + x) * m + i] += row[k] * avg(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i));
      }
    }
  }

  Certificate cert;
  cert.gains.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    const auto pieces = result.value.pieces(s);
    for (std::size_t p = 0; p < pieces.size(); ++p) {
      const MixedProfile& f = result.strategy[s][p];
      Eigen::VectorXd gain(static_cast<Eigen::Index>(m));
      for (std::size_t i = 0; i < m; ++i) {
        const double b = spec.discounts[i];
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.actions[i].size()));
        for (std::size_t x = 0; x < profiles; ++x) {
          const double w = others_probability(f, ps, x, i);
          if (w == 0.0) continue;
          rhs(static_cast<Eigen::Index>(ps.action_of(x, i))) +=
              w * ((1.0 - b) * spec.payoff(s, x, i) + b * cont[(s * profiles + x) * m + i]);
        }
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t a : spec.feasible[s][i]) best = std::max(best, rhs(static_cast<Eigen::Index>(a)));
        const double play = rhs.dot(f[i]);
        const double v = pieces[p].value(static_cast<Eigen::Index>(i));
        gain(static_cast<Eigen::Index>(i)) = std::max(best - v, std::abs(play - v));
      }
      cert.epsilon = std::max(cert.epsilon, gain.maxCoeff());
      cert.gains[s].push_back(std::move(gain));
    }
  }

  const auto exact = strategy_value(result, spec);
  for (std::size_t s = 0; s < n; ++s) {
    const auto pieces = result.value.pieces(s);
    for (std::size_t p = 0; p < pieces.size(); ++p)
      cert.recursion_gap =
          std::max(cert.recursion_gap, (exact[s][p] - pieces[p].value).cwiseAbs().maxCoeff());
  }
  return cert;
}

std::vector<std::vector<Eigen::VectorXd>> strategy_value(const EquilibriumResult& result,
                                                         const StochasticGameSpec& spec) {
  require_consistent_dimensions(spec);
  require_result_fits(result, spec);
  const std::size_t n = spec.states();
  const std::size_t m = spec.players();
  const std::size_t profiles = spec.profile_count();
  const ProfileSpace ps = spec.profile_space();
  const TransitionTable table(spec);

  std::vector<std::size_t> first(n + 1, 0);
  for (std::size_t k = 0; k < n; ++k) first[k + 1] = first[k] + result.value.pieces(k).size();
  const auto total = static_cast<Eigen::Index>(first[n]);

  // Piece-to-piece transition matrix and expected stage payoffs.
  Eigen::MatrixXd trans = Eigen::MatrixXd::Zero(total, total);
  Eigen::MatrixXd stage = Eigen::MatrixXd::Zero(total, static_cast<Eigen::Index>(m));
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t p = 0; p < result.value.pieces(s).size(); ++p) {
      const auto r = static_cast<Eigen::Index>(first[s] + p);
      const MixedProfile& f = result.strategy[s][p];
      for (std::size_t x = 0; x < profiles; ++x) {
        const double w = others_probability(f, ps, x, m);
        if (w == 0.0) continue;
        for (std::size_t i = 0; i < m; ++i) stage(r, static_cast<Eigen::Index>(i)) += w * spec.payoff(s, x, i);
        const double* row = table.row(s, x);
        for (std::size_t k = 0; k < n; ++k) {
          if (row[k] == 0.0) continue;
          const auto pieces = result.value.pieces(k);
          for (std::size_t q = 0; q < pieces.size(); ++q)
            trans(r, static_cast<Eigen::Index>(first[k] + q)) += w * row[k] * pieces[q].fraction;
        }
      }
    }
  }

  Eigen::MatrixXd values(total, static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    const double b = spec.discounts[i];
    const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(total, total) - b * trans;
    values.col(static_cast<Eigen::Index>(i)) =
        lhs.partialPivLu().solve((1.0 - b) * stage.col(static_cast<Eigen::Index>(i)));
  }
  std::vector<std::vector<Eigen::VectorXd>> out(n);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t p = 0; p < result.value.pieces(s).size(); ++p)
      out[s].push_back(values.row(static_cast<Eigen::Index>(first[s] + p)).transpose());
  return out;
}

}  // namespace smpe
