#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "smpe/errors.hpp"
#include "smpe/util/parallel.hpp"
#include "smpe/verify/certificate.hpp"
#include "smpe/verify/philox.hpp"
#include "smpe/verify/transitions.hpp"

namespace smpe {

std::size_t horizon_for(double max_discount, double payoff_bound, double truncation) {
  if (!(truncation > 0.0)) throw InvalidInput("truncation error must be positive");
  if (max_discount <= 0.0 || truncation >= payoff_bound) return 1;
  const double h = std::ceil(std::log(truncation / payoff_bound) / std::log(max_discount));
  return std::max<std::size_t>(1, static_cast<std::size_t>(h));
}

namespace {

// Index of the first cumulative weight above u * total.
std::size_t draw(const std::vector<double>& cumulative, double u) {
  const double target = u * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  const auto idx = static_cast<std::size_t>(it - cumulative.begin());
  return std::min(idx, cumulative.size() - 1);
}

std::vector<double> cumulate(std::vector<double> w) {
  for (std::size_t k = 1; k < w.size(); ++k) w[k] += w[k - 1];
  return w;
}

}  // namespace

SimulationReport simulate_payoffs(const StochasticGameSpec& spec, const EquilibriumResult& result,
                                  PieceRef start, const SimulationOptions& options) {
  require_consistent_dimensions(spec);
  require_result_fits(result, spec);
  if (options.paths == 0) throw InvalidInput("simulation needs at least one path");
  if (start.cell >= spec.states() || start.piece >= result.value.pieces(start.cell).size()) {
    throw InvalidInput(fmt::format("start ({}, {}) is not a piece of the result", start.cell, start.piece));
  }
  const double beta = spec.max_discount();
  const double bound = spec.payoff_bound;
  std::size_t horizon;
  if (options.horizon) {
    horizon = *options.horizon;
    if (horizon == 0) throw InvalidInput("horizon must be positive");
    const double tail = beta == 0.0 ? 0.0 : std::pow(beta, static_cast<double>(horizon)) * bound;
    if (tail > options.truncation * (1.0 + 1e-12)) {
      throw InvalidInput(fmt::format("horizon {} leaves a tail of {:.3g} above the truncation {:.3g}",
                                     horizon, tail, options.truncation));
    }
  } else {
    horizon = horizon_for(beta, bound, options.truncation);
  }

  const std::size_t n = spec.states();
  const std::size_t m = spec.players();
  const std::size_t profiles = spec.profile_count();
  const ProfileSpace ps = spec.profile_space();
  const TransitionTable table(spec);

  std::vector<std::vector<double>> next_cell(n * profiles);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t x = 0; x < profiles; ++x)
      next_cell[s * profiles + x] = cumulate(std::vector<double>(table.row(s, x), table.row(s, x) + n));
  std::vector<std::vector<double>> next_piece(n);
  std::vector<std::vector<std::vector<std::vector<double>>>> action(n);  // [cell][piece][player]
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> fractions;
    for (const SplitPiece& p : result.value.pieces(k)) fractions.push_back(p.fraction);
    next_piece[k] = cumulate(std::move(fractions));
    for (const MixedProfile& f : result.strategy[k]) {
      std::vector<std::vector<double>> per_player;
      for (std::size_t i = 0; i < m; ++i)
        per_player.push_back(cumulate(std::vector<double>(f[i].data(), f[i].data() + f[i].size())));
      action[k].push_back(std::move(per_player));
    }
  }

  std::vector<double> weight(m);
  for (std::size_t i = 0; i < m; ++i) weight[i] = 1.0 - spec.discounts[i];

  Eigen::MatrixXd totals(static_cast<Eigen::Index>(options.paths), static_cast<Eigen::Index>(m));
  std::vector<std::size_t> atom_visits(options.paths, 0);
  parallel_for(options.paths, options.threads, [&](std::size_t path) {
    PhiloxStream rng(options.seed, path);
    std::size_t cell = start.cell;
    std::size_t piece = start.piece;
    std::vector<double> discount = weight;
    std::vector<double> sum(m, 0.0);
    std::vector<std::size_t> profile(m);
    for (std::size_t t = 0; t < horizon; ++t) {
      if (t > 0 && !spec.space.divisible(cell)) ++atom_visits[path];
      for (std::size_t i = 0; i < m; ++i) profile[i] = draw(action[cell][piece][i], rng.next_double());
      const std::size_t x = ps.index(profile);
      for (std::size_t i = 0; i < m; ++i) {
        sum[i] += discount[i] * spec.payoff(cell, x, i);
        discount[i] *= spec.discounts[i];
      }
      const std::size_t next = draw(next_cell[cell * profiles + x], rng.next_double());
      piece = draw(next_piece[next], rng.next_double());
      cell = next;
    }
    for (std::size_t i = 0; i < m; ++i)
      totals(static_cast<Eigen::Index>(path), static_cast<Eigen::Index>(i)) = sum[i];
  });

  SimulationReport report;
  report.start = start;
  report.paths = options.paths;
  report.horizon = horizon;
  report.seed = options.seed;
  const double count = static_cast<double>(options.paths);
  report.mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  report.standard_error = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  for (std::size_t path = 0; path < options.paths; ++path)
    report.mean += totals.row(static_cast<Eigen::Index>(path)).transpose();
  report.mean /= count;
  if (options.paths > 1) {
    Eigen::VectorXd ss = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    for (std::size_t path = 0; path < options.paths; ++path)
      ss += (totals.row(static_cast<Eigen::Index>(path)).transpose() - report.mean).array().square().matrix();
    report.standard_error = (ss / ((count - 1.0) * count)).cwiseSqrt();
  }
  std::size_t visits = 0;
  for (std::size_t v : atom_visits) visits += v;
  report.atom_occupancy =
      horizon > 1 ? static_cast<double>(visits) / (count * static_cast<double>(horizon - 1)) : 0.0;
  return report;
}

}  // namespace smpe
