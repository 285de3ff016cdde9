#include "smpe/stage/nash.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/LU>
#include <fmt/format.h>

#include "smpe/errors.hpp"

namespace smpe {

namespace {

using Strategy = std::vector<Eigen::VectorXd>;

constexpr double kGolden = 0.6180339887498949;
constexpr double kNegativeTol = 1e-12;

StageGame perturbed(const StageGame& g, double size) {
  StageGame out = g;
  const auto m = static_cast<Eigen::Index>(g.players());
  for (Eigen::Index x = 0; x < g.payoff.rows(); ++x) {
    for (Eigen::Index i = 0; i < m; ++i) {
      const double t = static_cast<double>(x * m + i + 1) * kGolden;
      out.payoff(x, i) += size * (t - std::floor(t));
    }
  }
  return out;
}

// Clips tiny negative entries and renormalizes; false if a probability is
// clearly negative or the vector is not a distribution.
bool clean_distribution(Eigen::VectorXd& p) {
  for (Eigen::Index a = 0; a < p.size(); ++a) {
    if (!std::isfinite(p(a)) || p(a) < -kNegativeTol) return false;
    if (p(a) < 0.0) p(a) = 0.0;
  }
  const double total = p.sum();
  if (!(total > 0.5)) return false;
  p /= total;
  return true;
}

std::vector<std::vector<std::size_t>> subsets_of_size(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    out.push_back(idx);
    std::size_t pos = k;
    while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (std::size_t q = pos; q < k; ++q) idx[q] = idx[q - 1] + 1;
  }
  return out;
}

std::vector<std::vector<std::size_t>> nonempty_subsets(std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t k = 1; k <= n; ++k) {
    auto part = subsets_of_size(n, k);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

std::vector<Strategy> solve_one_player(const StageGame& g, double tol) {
  const Eigen::VectorXd v = g.payoff.col(0);
  const double best = v.maxCoeff();
  std::vector<Strategy> out;
  for (Eigen::Index a = 0; a < v.size(); ++a) {
    if (v(a) >= best - tol) {
      Eigen::VectorXd p = Eigen::VectorXd::Zero(v.size());
      p(a) = 1.0;
      out.push_back({p});
    }
  }
  return out;
}

// Mix on `support` of the opponent that makes every action of `support_own`
// indifferent for the owner of `payoff` (rows: own actions, cols: opponent).
bool indifference_mix(const Eigen::MatrixXd& payoff, const std::vector<std::size_t>& own,
                      const std::vector<std::size_t>& other, Eigen::VectorXd& mix) {
  const auto k = static_cast<Eigen::Index>(own.size());
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(k + 1, k + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < k; ++c)
      sys(r, c) = payoff(static_cast<Eigen::Index>(own[static_cast<std::size_t>(r)]),
                         static_cast<Eigen::Index>(other[static_cast<std::size_t>(c)]));
    sys(r, k) = -1.0;
  }
  for (Eigen::Index c = 0; c < k; ++c) sys(k, c) = 1.0;
  rhs(k) = 1.0;
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
  if (!lu.isInvertible()) return false;
  const Eigen::VectorXd sol = lu.solve(rhs);
  if ((sys * sol - rhs).cwiseAbs().maxCoeff() > 1e-9) return false;
  mix = sol.head(k);
  return true;
}

std::vector<Strategy> solve_two_player(const StageGame& g, double accept_tol) {
  const std::size_t n0 = g.actions[0].size();
  const std::size_t n1 = g.actions[1].size();
  Eigen::MatrixXd a(static_cast<Eigen::Index>(n0), static_cast<Eigen::Index>(n1));
  Eigen::MatrixXd b(static_cast<Eigen::Index>(n1), static_cast<Eigen::Index>(n0));
  for (std::size_t x = 0; x < g.profiles.size(); ++x) {
    const auto r = static_cast<Eigen::Index>(g.profiles.action_of(x, 0));
    const auto c = static_cast<Eigen::Index>(g.profiles.action_of(x, 1));
    a(r, c) = g.payoff(static_cast<Eigen::Index>(x), 0);
    b(c, r) = g.payoff(static_cast<Eigen::Index>(x), 1);
  }

  std::vector<Strategy> out;
  for (std::size_t k = 1; k <= std::min(n0, n1); ++k) {
    const auto s0_list = subsets_of_size(n0, k);
    const auto s1_list = subsets_of_size(n1, k);
    for (const auto& s0 : s0_list) {
      for (const auto& s1 : s1_list) {
        Eigen::VectorXd y;
        Eigen::VectorXd x;
        if (!indifference_mix(a, s0, s1, y) || !indifference_mix(b, s1, s0, x)) continue;
        Strategy st = {Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n0)),
                       Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n1))};
        for (std::size_t q = 0; q < k; ++q) {
          st[0](static_cast<Eigen::Index>(s0[q])) = x(static_cast<Eigen::Index>(q));
          st[1](static_cast<Eigen::Index>(s1[q])) = y(static_cast<Eigen::Index>(q));
        }
        if (!clean_distribution(st[0]) || !clean_distribution(st[1])) continue;
        if (deviation_gain(g, st) <= accept_tol) out.push_back(std::move(st));
      }
    }
  }
  return out;
}

// Expected payoff of player i when the players listed in `fixed` play the
// given actions and everyone else follows `st`.
double conditional_value(const StageGame& g, const Strategy& st, std::size_t i,
                         const std::vector<std::pair<std::size_t, std::size_t>>& fixed) {
  double total = 0.0;
  for (std::size_t x = 0; x < g.profiles.size(); ++x) {
    double p = 1.0;
    for (std::size_t j = 0; j < g.players() && p != 0.0; ++j) {
      const std::size_t aj = g.profiles.action_of(x, j);
      auto it = std::find_if(fixed.begin(), fixed.end(), [&](const auto& f) { return f.first == j; });
      if (it != fixed.end()) {
        if (it->second != aj) p = 0.0;
      } else {
        p *= st[j](static_cast<Eigen::Index>(aj));
      }
    }
    if (p != 0.0) total += p * g.payoff(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(i));
  }
  return total;
}

// Damped Newton on the indifference system of one support profile.
std::vector<Strategy> solve_support_newton(const StageGame& g,
                                           const std::vector<std::vector<std::size_t>>& support,
                                           double accept_tol) {
  const std::size_t m = g.players();
  std::vector<std::size_t> offset(m + 1, 0);
  for (std::size_t i = 0; i < m; ++i) offset[i + 1] = offset[i] + support[i].size();
  const std::size_t n_mix = offset[m];
  const auto dim = static_cast<Eigen::Index>(n_mix + m);

  auto to_strategy = [&](const Eigen::VectorXd& z) {
    Strategy st(m);
    for (std::size_t i = 0; i < m; ++i) {
      st[i] = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.actions[i].size()));
      for (std::size_t q = 0; q < support[i].size(); ++q)
        st[i](static_cast<Eigen::Index>(support[i][q])) = z(static_cast<Eigen::Index>(offset[i] + q));
    }
    return st;
  };
  auto residual = [&](const Eigen::VectorXd& z) {
    const Strategy st = to_strategy(z);
    Eigen::VectorXd f(dim);
    Eigen::Index row = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const double v = z(static_cast<Eigen::Index>(n_mix + i));
      for (std::size_t a : support[i]) f(row++) = conditional_value(g, st, i, {{i, a}}) - v;
    }
    for (std::size_t i = 0; i < m; ++i) {
      double s = -1.0;
      for (std::size_t q = 0; q < support[i].size(); ++q) s += z(static_cast<Eigen::Index>(offset[i] + q));
      f(row++) = s;
    }
    return f;
  };
  auto jacobian = [&](const Eigen::VectorXd& z) {
    const Strategy st = to_strategy(z);
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::Index row = 0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t a : support[i]) {
        for (std::size_t j = 0; j < m; ++j) {
          if (j == i) continue;
          for (std::size_t q = 0; q < support[j].size(); ++q) {
            jac(row, static_cast<Eigen::Index>(offset[j] + q)) =
                conditional_value(g, st, i, {{i, a}, {j, support[j][q]}});
          }
        }
        jac(row, static_cast<Eigen::Index>(n_mix + i)) = -1.0;
        ++row;
      }
    }
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t q = 0; q < support[i].size(); ++q) jac(row, static_cast<Eigen::Index>(offset[i] + q)) = 1.0;
      ++row;
    }
    return jac;
  };

  std::vector<Strategy> out;
  for (std::size_t start = 0; start < 8; ++start) {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(dim);
    for (std::size_t i = 0; i < m; ++i) {
      double total = 0.0;
      for (std::size_t q = 0; q < support[i].size(); ++q) {
        double w = 1.0;
        if (start > 0) {
          const double t = static_cast<double>(start * (i + 1) + q * 7 + 1) * kGolden;
          w = 0.2 + (t - std::floor(t));
        }
        z(static_cast<Eigen::Index>(offset[i] + q)) = w;
        total += w;
      }
      for (std::size_t q = 0; q < support[i].size(); ++q) z(static_cast<Eigen::Index>(offset[i] + q)) /= total;
    }
    {
      const Strategy st = to_strategy(z);
      for (std::size_t i = 0; i < m; ++i)
        z(static_cast<Eigen::Index>(n_mix + i)) = conditional_value(g, st, i, {{i, support[i][0]}});
    }

    Eigen::VectorXd f = residual(z);
    double norm = f.norm();
    for (int it = 0; it < 60 && norm > 1e-14; ++it) {
      const Eigen::FullPivLU<Eigen::MatrixXd> lu(jacobian(z));
      if (!lu.isInvertible()) break;
      const Eigen::VectorXd step = lu.solve(-f);
      double t = 1.0;
      bool improved = false;
      for (int half = 0; half < 30; ++half, t *= 0.5) {
        const Eigen::VectorXd trial = z + t * step;
        const Eigen::VectorXd ft = residual(trial);
        if (ft.norm() < (1.0 - 1e-4 * t) * norm) {
          z = trial;
          f = ft;
          norm = ft.norm();
          improved = true;
          break;
        }
      }
      if (!improved) break;
    }
    if (norm > 1e-11) continue;
    Strategy st = to_strategy(z);
    bool valid = true;
    for (auto& p : st) valid = valid && clean_distribution(p);
    if (valid && deviation_gain(g, st) <= accept_tol) out.push_back(std::move(st));
  }
  return out;
}

std::vector<Strategy> solve_three_player(const StageGame& g, double accept_tol) {
  std::vector<std::vector<std::vector<std::size_t>>> options;
  for (std::size_t i = 0; i < g.players(); ++i) options.push_back(nonempty_subsets(g.actions[i].size()));
  std::vector<Strategy> out;
  std::vector<std::size_t> pick(g.players(), 0);
  while (true) {
    std::vector<std::vector<std::size_t>> support;
    bool pure = true;
    for (std::size_t i = 0; i < g.players(); ++i) {
      support.push_back(options[i][pick[i]]);
      pure = pure && support.back().size() == 1;
    }
    if (pure) {
      Strategy st;
      for (std::size_t i = 0; i < g.players(); ++i) {
        Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.actions[i].size()));
        p(static_cast<Eigen::Index>(support[i][0])) = 1.0;
        st.push_back(std::move(p));
      }
      if (deviation_gain(g, st) <= accept_tol) out.push_back(std::move(st));
    } else {
      auto found = solve_support_newton(g, support, accept_tol);
      for (auto& st : found) out.push_back(std::move(st));
    }
    std::size_t i = g.players();
    while (i > 0 && ++pick[i - 1] == options[i - 1].size()) pick[--i] = 0;
    if (i == 0) break;
  }
  return out;
}

double strategy_distance(const Strategy& a, const Strategy& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, (a[i] - b[i]).cwiseAbs().maxCoeff());
  return d;
}

std::vector<Strategy> verified_unique(const StageGame& g, std::vector<Strategy> found,
                                      const NashOptions& o) {
  std::vector<Strategy> out;
  for (auto& st : found) {
    if (deviation_gain(g, st) > o.best_response_tol) continue;
    const bool dup = std::any_of(out.begin(), out.end(), [&](const Strategy& s) {
      return strategy_distance(s, st) <= o.dedup_tol;
    });
    if (!dup) out.push_back(std::move(st));
  }
  return out;
}

std::vector<Strategy> enumerate_raw(const StageGame& g, double accept_tol) {
  switch (g.players()) {
    case 1:
      return solve_one_player(g, accept_tol);
    case 2:
      return solve_two_player(g, accept_tol);
    default:
      return solve_three_player(g, accept_tol);
  }
}

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    if (a(k) < b(k)) return true;
    if (a(k) > b(k)) return false;
  }
  return false;
}

NashSet regret_matching(const StageGame& g, const NashOptions& o) {
  const std::size_t m = g.players();
  Strategy current(m);
  Strategy average(m);
  std::vector<Eigen::VectorXd> regret(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto n = static_cast<Eigen::Index>(g.actions[i].size());
    current[i] = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    average[i] = Eigen::VectorXd::Zero(n);
    regret[i] = Eigen::VectorXd::Zero(n);
  }
  double best = std::numeric_limits<double>::infinity();
  Strategy best_strategy = current;
  for (std::size_t t = 1; t <= o.approx_iterations; ++t) {
    for (std::size_t i = 0; i < m; ++i) average[i] += current[i];
    std::vector<Eigen::VectorXd> values(m);
    for (std::size_t i = 0; i < m; ++i) values[i] = action_values(g, current, i);
    for (std::size_t i = 0; i < m; ++i) {
      regret[i].array() += values[i].array() - values[i].dot(current[i]);
      regret[i] = regret[i].cwiseMax(0.0);  // regret matching plus
      const double total = regret[i].sum();
      const auto n = regret[i].size();
      current[i] = total > 0.0 ? Eigen::VectorXd(regret[i] / total)
                               : Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    }
    if (t % 500 == 0 || t == o.approx_iterations) {
      Strategy avg(m);
      for (std::size_t i = 0; i < m; ++i) avg[i] = average[i] / average[i].sum();
      const double gain = deviation_gain(g, avg);
      if (gain < best) {
        best = gain;
        best_strategy = avg;
      }
      if (best <= o.approx_epsilon) break;
    }
  }
  if (best > o.approx_epsilon) {
    throw NoConvergence(fmt::format("regret matching reached epsilon {:.3g} (target {:.3g})", best,
                                    o.approx_epsilon),
                        best);
  }
  NashSet out;
  out.points.push_back({best_strategy, expected_payoff(g, best_strategy)});
  out.perturbed_count = out.unperturbed_count = 1;
  out.epsilon = best;
  out.approximate = true;
  return out;
}

bool use_exact(const StageGame& g) {
  std::size_t widest = 0;
  for (const auto& a : g.actions) widest = std::max(widest, a.size());
  if (g.players() <= 2) return widest <= 8;
  return g.players() == 3 && widest <= 4;
}

}  // namespace

double deviation_gain(const StageGame& g, const std::vector<Eigen::VectorXd>& strategy) {
  const Eigen::VectorXd value = expected_payoff(g, strategy);
  double gain = 0.0;
  for (std::size_t i = 0; i < g.players(); ++i)
    gain = std::max(gain, action_values(g, strategy, i).maxCoeff() - value(static_cast<Eigen::Index>(i)));
  return gain;
}

NashSet nash_enumerate(const StageGame& g, const NashOptions& options) {
  if (g.players() == 0) throw InvalidInput("stage game has no players");
  for (const auto& a : g.actions)
    if (a.empty()) throw InvalidInput("stage game player has no actions");

  const bool exact = options.mode == NashMode::Exact ||
                     (options.mode == NashMode::Auto && use_exact(g));
  if (!exact) return regret_matching(g, options);
  if (g.players() > 3) throw InvalidInput("exact enumeration supports at most three players");

  // Candidates are accepted loosely on the game they were solved on and then
  // checked against the original payoffs.
  const double accept = 1e3 * options.best_response_tol;
  std::vector<Strategy> raw = verified_unique(g, enumerate_raw(g, accept), options);
  std::vector<Strategy> pert;
  if (g.players() > 1) {
    pert = verified_unique(g, enumerate_raw(perturbed(g, options.perturbation), accept), options);
  } else {
    pert = raw;
  }

  NashSet out;
  out.unperturbed_count = raw.size();
  out.perturbed_count = pert.size();
  out.degenerate = raw.size() != pert.size();
  std::vector<Strategy> all = std::move(pert);
  all.insert(all.end(), std::make_move_iterator(raw.begin()), std::make_move_iterator(raw.end()));
  all = verified_unique(g, std::move(all), options);
  if (all.empty()) {
    // Newton can miss every mixed solution of a three-player game.
    NashOptions approx = options;
    approx.approx_epsilon = std::max(options.approx_epsilon, options.best_response_tol);
    NashSet fallback = regret_matching(g, approx);
    fallback.degenerate = true;
    return fallback;
  }
  for (auto& st : all) {
    Eigen::VectorXd pay = expected_payoff(g, st);
    out.epsilon = std::max(out.epsilon, deviation_gain(g, st));
    out.points.push_back({std::move(st), std::move(pay)});
  }
  std::sort(out.points.begin(), out.points.end(), [](const NashPoint& a, const NashPoint& b) {
    if (lex_less(a.payoff, b.payoff)) return true;
    if (lex_less(b.payoff, a.payoff)) return false;
    for (std::size_t i = 0; i < a.strategy.size(); ++i) {
      if (lex_less(a.strategy[i], b.strategy[i])) return true;
      if (lex_less(b.strategy[i], a.strategy[i])) return false;
    }
    return false;
  });
  return out;
}

}  // namespace smpe
