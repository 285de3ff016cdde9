#include "smpe/kernel/generators.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <fmt/format.h>

#include "smpe/errors.hpp"

namespace smpe {

namespace {

constexpr double kMassTol = 1e-9;

void apply_config(StochasticGameSpec& spec, const GameConfig& config) {
  if (!config.payoff) return;
  for (std::size_t s = 0; s < spec.states(); ++s)
    for (std::size_t x = 0; x < spec.profile_count(); ++x)
      for (std::size_t i = 0; i < spec.players(); ++i) spec.payoff(s, x, i) = config.payoff(s, x, i);
}

void require_config(const GameConfig& config) {
  if (config.discounts.empty() || config.discounts.size() != config.actions.size()) {
    throw InvalidInput("game config needs one action list per discount factor");
  }
}

}  // namespace

double levy_uniform_share(std::size_t c_action, std::size_t d_action) {
  // action 0 is "1", action 1 is "-1"
  return 0.5 * static_cast<double>(c_action) + 0.5 * static_cast<double>(d_action);
}

StochasticGameSpec make_levy_game(const LevyParams& p) {
  if (!(p.alpha > 0.0 && p.alpha <= 1.0)) throw InvalidInput("alpha must lie in (0, 1]");
  if (p.cells < 2) throw InvalidInput("Levy grid needs at least two cells");
  if (!(p.atom_weight > 0.0 && p.atom_weight < 1.0)) {
    throw InvalidInput("atom weight must lie in (0, 1)");
  }
  const std::size_t n = p.cells;
  const std::size_t block = p.block_size == 0 ? n : p.block_size;
  if (n % block != 0) throw InvalidInput(fmt::format("block size {} does not divide {}", block, n));

  std::vector<Cell> cells;
  std::vector<std::size_t> coarse;
  const double width = 1.0 / static_cast<double>(n);
  for (std::size_t c = 0; c < n; ++c) {
    cells.push_back({(1.0 - p.atom_weight) * width, true});
    coarse.push_back(c / block);
  }
  cells.push_back({p.atom_weight, false});
  coarse.push_back(n / block);

  std::vector<std::vector<std::string>> actions = {{"L", "M", "R"}, {"L", "M", "R"}, {"1", "-1"},
                                                   {"1", "-1"}};
  for (std::size_t t = 0; t < p.theta_players; ++t) actions.push_back({"L", "R"});
  std::vector<double> discounts(actions.size(), p.discount);

  StochasticGameSpec spec = make_blank_game(std::move(discounts), std::move(actions), 1.0,
                                            GridSpace(std::move(cells), std::move(coarse)), block);
  for (std::size_t k = 0; k < n; ++k) spec.kernel.rho[k % block][k] = 1.0;

  const ProfileSpace ps = spec.profile_space();
  for (std::size_t s = 0; s <= n; ++s) {
    const double src = s < n ? (static_cast<double>(s) + 0.5) * width : 1.0;
    for (std::size_t x = 0; x < ps.size(); ++x) {
      const double share = levy_uniform_share(ps.action_of(x, 2), ps.action_of(x, 3));
      const double uniform_mass = p.alpha * (1.0 - src) * share;
      double placed = 0.0;
      if (uniform_mass > 0.0) {
        for (std::size_t k = 0; k < n; ++k) {
          const double lo = static_cast<double>(k) * width;
          const double hi = lo + width;
          double covered;
          if (p.midpoint) {
            covered = lo + 0.5 * width >= src ? width : 0.0;
          } else {
            covered = std::max(0.0, hi - std::max(lo, src));
          }
          // Lebesgue mass of U(s,1) on cell k, scaled to the uniform part
          const double mass = uniform_mass * covered / (1.0 - src);
          placed += mass;
          spec.kernel.at(k % block, k / block, s, x) = mass / spec.space.mass(k);
        }
      }
      spec.atom_kernel.at(0, s, x) = p.midpoint ? 1.0 - uniform_mass : 1.0 - placed;
    }
  }
  return spec;
}

StochasticGameSpec make_nowak_game(const NowakParams& p, const GameConfig& config) {
  require_config(config);
  const std::size_t j_count = p.mu.size();
  const std::size_t k_count = p.atoms;
  if (j_count == 0) throw InvalidInput("Nowak game needs at least one atomless component");
  if (p.cells == 0) throw InvalidInput("Nowak game needs at least one divisible cell");
  if (!p.weights) throw InvalidInput("Nowak game needs mixing weights");
  for (std::size_t j = 0; j < j_count; ++j) {
    if (p.mu[j].size() != p.cells) {
      throw InvalidInput(fmt::format("component {} has {} cells, expected {}", j, p.mu[j].size(),
                                     p.cells));
    }
    double total = 0.0;
    for (double v : p.mu[j]) {
      if (!std::isfinite(v) || v < 0.0) throw InvalidInput(fmt::format("component {} has negative mass", j));
      total += v;
    }
    if (std::abs(total - 1.0) > kMassTol) {
      throw InvalidInput(fmt::format("component {} has total mass {}", j, total));
    }
  }

  const double share = 1.0 / static_cast<double>(j_count + k_count);
  std::vector<Cell> cells;
  std::vector<std::size_t> coarse;
  for (std::size_t c = 0; c < p.cells; ++c) {
    double mass = 0.0;
    for (const auto& mu : p.mu) mass += mu[c];
    cells.push_back({mass * share, true});
    coarse.push_back(0);
  }
  for (std::size_t a = 0; a < k_count; ++a) {
    cells.push_back({share, false});
    coarse.push_back(1 + a);
  }

  StochasticGameSpec spec =
      make_blank_game(config.discounts, config.actions, config.payoff_bound,
                      GridSpace(std::move(cells), std::move(coarse)), j_count);
  for (std::size_t j = 0; j < j_count; ++j) {
    for (std::size_t c = 0; c < p.cells; ++c) {
      const double lambda = spec.space.mass(c);
      spec.kernel.rho[j][c] = lambda > 0.0 ? p.mu[j][c] / lambda : 0.0;
    }
  }

  for (std::size_t s = 0; s < spec.states(); ++s) {
    for (std::size_t x = 0; x < spec.profile_count(); ++x) {
      const std::vector<double> w = p.weights(s, x);
      if (w.size() != j_count + k_count) {
        throw InvalidInput(fmt::format("mixing weights at state {}, profile {} have size {}", s, x,
                                       w.size()));
      }
      double total = 0.0;
      for (double v : w) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
          throw InvalidInput(fmt::format("mixing weight {} outside [0,1] at state {}", v, s));
        }
        total += v;
      }
      if (std::abs(total - 1.0) > kMassTol) {
        throw InvalidInput(fmt::format("mixing weights sum to {} at state {}, profile {}", total, s, x));
      }
      for (std::size_t j = 0; j < j_count; ++j) spec.kernel.at(j, 0, s, x) = w[j];
      for (std::size_t a = 0; a < k_count; ++a) spec.atom_kernel.at(a, s, x) = w[j_count + a];
    }
  }
  apply_config(spec, config);
  return spec;
}

StochasticGameSpec make_noisy_game(const NoisyGameParams& p, const GameConfig& config) {
  require_config(config);
  const std::size_t nh = p.kappa.size();
  const std::size_t nr = p.nu.size();
  if (nh == 0 || nr == 0) throw InvalidInput("noisy game needs nonempty H and R grids");
  if (p.beta.size() != nh) throw InvalidInput("beta needs one row per H cell");
  if (!p.alpha) throw InvalidInput("noisy game needs alpha");
  auto check_mass = [](double v, const char* what) {
    if (!std::isfinite(v) || v < 0.0) throw InvalidInput(fmt::format("{} has invalid value {}", what, v));
  };
  for (double v : p.kappa) check_mass(v, "kappa");
  for (double v : p.nu) check_mass(v, "nu");
  for (std::size_t h = 0; h < nh; ++h) {
    if (p.beta[h].size() != nr) throw InvalidInput("beta row has wrong length");
    double integral = 0.0;
    for (std::size_t r = 0; r < nr; ++r) {
      check_mass(p.beta[h][r], "beta");
      integral += p.beta[h][r] * p.nu[r];
    }
    if (std::abs(integral - 1.0) > kMassTol) {
      throw InvalidInput(fmt::format("beta(.|{}) integrates to {}", h, integral));
    }
  }

  std::vector<Cell> cells;
  std::vector<std::size_t> coarse;
  double total = 0.0;
  for (std::size_t h = 0; h < nh; ++h) {
    for (std::size_t r = 0; r < nr; ++r) {
      const double mass = p.kappa[h] * p.nu[r] * p.beta[h][r];
      cells.push_back({mass, true});
      coarse.push_back(h);
      total += mass;
    }
  }
  if (!(total > 0.0)) throw InvalidInput("reference measure has zero total mass");

  StochasticGameSpec spec = make_blank_game(config.discounts, config.actions, config.payoff_bound,
                                            GridSpace(std::move(cells), std::move(coarse)), 1);
  std::fill(spec.kernel.rho[0].begin(), spec.kernel.rho[0].end(), 1.0);
  for (std::size_t s = 0; s < spec.states(); ++s) {
    for (std::size_t x = 0; x < spec.profile_count(); ++x) {
      double integral = 0.0;
      for (std::size_t h = 0; h < nh; ++h) {
        const double a = p.alpha(h, s, x);
        check_mass(a, "alpha");
        spec.kernel.at(0, h, s, x) = a;
        integral += a * p.kappa[h];
      }
      if (std::abs(integral - 1.0) > kMassTol) {
        throw InvalidInput(fmt::format("alpha(.|{},{}) integrates to {}", s, x, integral));
      }
    }
  }
  apply_config(spec, config);
  return spec;
}

GameConfig random_game_config(std::mt19937_64& rng, std::size_t players, std::size_t actions,
                              std::size_t states, double max_discount, double payoff_bound) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  GameConfig config;
  config.payoff_bound = payoff_bound;
  for (std::size_t i = 0; i < players; ++i) {
    config.discounts.push_back(max_discount * unit(rng));
    std::vector<std::string> labels;
    for (std::size_t a = 0; a < actions; ++a) labels.push_back(fmt::format("a{}", a));
    config.actions.push_back(std::move(labels));
  }
  std::size_t profiles = 1;
  for (std::size_t i = 0; i < players; ++i) profiles *= actions;
  auto table = std::make_shared<std::vector<double>>(states * profiles * players);
  for (double& v : *table) v = payoff_bound * (2.0 * unit(rng) - 1.0);
  config.payoff = [table, profiles, players](std::size_t s, std::size_t x, std::size_t i) {
    return (*table)[(s * profiles + x) * players + i];
  };
  return config;
}

NowakParams random_nowak_params(std::mt19937_64& rng, std::size_t cells, std::size_t j,
                                std::size_t k, std::size_t profiles) {
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  NowakParams p;
  p.cells = cells;
  p.atoms = k;
  for (std::size_t c = 0; c < j; ++c) {
    std::vector<double> mu(cells);
    double total = 0.0;
    for (double& v : mu) total += (v = weight(rng));
    for (double& v : mu) v /= total;
    p.mu.push_back(std::move(mu));
  }
  const std::size_t states = cells + k;
  const std::size_t width = j + k;
  auto table = std::make_shared<std::vector<double>>(states * profiles * width);
  for (std::size_t row = 0; row < states * profiles; ++row) {
    double total = 0.0;
    for (std::size_t c = 0; c < width; ++c) total += ((*table)[row * width + c] = weight(rng));
    for (std::size_t c = 0; c < width; ++c) (*table)[row * width + c] /= total;
  }
  p.weights = [table, profiles, width](std::size_t s, std::size_t x) {
    const auto first = table->begin() + static_cast<std::ptrdiff_t>((s * profiles + x) * width);
    return std::vector<double>(first, first + static_cast<std::ptrdiff_t>(width));
  };
  return p;
}

NoisyGameParams random_noisy_params(std::mt19937_64& rng, std::size_t h_cells,
                                    std::size_t r_cells, std::size_t profiles, bool tilted) {
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  NoisyGameParams p;
  double total = 0.0;
  p.kappa.resize(h_cells);
  for (double& v : p.kappa) total += (v = weight(rng));
  for (double& v : p.kappa) v /= total;
  total = 0.0;
  p.nu.resize(r_cells);
  for (double& v : p.nu) total += (v = weight(rng));
  for (double& v : p.nu) v /= total;

  p.beta.assign(h_cells, std::vector<double>(r_cells, 1.0));
  if (tilted) {
    for (auto& row : p.beta) {
      double integral = 0.0;
      for (std::size_t r = 0; r < r_cells; ++r) integral += (row[r] = weight(rng)) * p.nu[r];
      for (double& v : row) v /= integral;
    }
  }

  const std::size_t states = h_cells * r_cells;
  auto table = std::make_shared<std::vector<double>>(states * profiles * h_cells);
  for (std::size_t row = 0; row < states * profiles; ++row) {
    double integral = 0.0;
    for (std::size_t h = 0; h < h_cells; ++h)
      integral += ((*table)[row * h_cells + h] = weight(rng)) * p.kappa[h];
    for (std::size_t h = 0; h < h_cells; ++h) (*table)[row * h_cells + h] /= integral;
  }
  p.alpha = [table, profiles, h_cells](std::size_t h, std::size_t s, std::size_t x) {
    return (*table)[(s * profiles + x) * h_cells + h];
  };
  return p;
}

}  // namespace smpe
