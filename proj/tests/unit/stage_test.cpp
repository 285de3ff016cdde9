#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "smpe/errors.hpp"
#include "smpe/game/spec.hpp"
#include "smpe/stage/nash.hpp"
#include "smpe/stage/stage_game.hpp"
#include "support/oracles.hpp"

using namespace smpe;

namespace {

StageGame bimatrix(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
  const std::size_t rows = a.size();
  const std::size_t cols = a.front().size();
  std::vector<std::size_t> r(rows), c(cols);
  for (std::size_t i = 0; i < rows; ++i) r[i] = i;
  for (std::size_t j = 0; j < cols; ++j) c[j] = j;
  Eigen::MatrixXd payoff(static_cast<Eigen::Index>(rows * cols), 2);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      payoff(static_cast<Eigen::Index>(i * cols + j), 0) = a[i][j];
      payoff(static_cast<Eigen::Index>(i * cols + j), 1) = b[i][j];
    }
  return StageGame({r, c}, payoff);
}

// One player, one action, two half-mass divisible cells in one coarse cell
// and an atom of mass 0 or more, q_1 = 1 - atom_share, rho_1 = 1.
StochasticGameSpec tiny_game(double beta, double atom_share) {
  GridSpace space({{0.5, true}, {0.5, true}, {0.0, false}}, {0, 0, 1});
  StochasticGameSpec spec = make_blank_game({beta}, {{"a"}}, 1.0, space, 1);
  spec.kernel.rho[0] = {1.0, 1.0, 0.0};
  for (std::size_t s = 0; s < 3; ++s) {
    spec.kernel.at(0, 0, s, 0) = 1.0 - atom_share;
    spec.atom_kernel.at(0, s, 0) = atom_share;
    spec.payoff(s, 0, 0) = 0.4;
  }
  return spec;
}

bool contains(const NashSet& set, const std::vector<Eigen::VectorXd>& strategy, double tol) {
  return std::any_of(set.points.begin(), set.points.end(), [&](const NashPoint& p) {
    for (std::size_t i = 0; i < strategy.size(); ++i)
      if ((p.strategy[i] - strategy[i]).cwiseAbs().maxCoeff() > tol) return false;
    return true;
  });
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST(StageGame, ContinuationTermFromAggregates) {
  const StochasticGameSpec spec = tiny_game(0.5, 0.0);
  AggregateVector c(1, 1, 2);
  c.at(0, 0, 0) = 0.5;
  const Eigen::MatrixXd v2 = Eigen::MatrixXd::Zero(1, 1);
  const StageGame g = build_stage_game(spec, 0, c, v2);
  // (1 - 0.5) * 0.4 + 0.5 * (1 * 0.5)
  EXPECT_DOUBLE_EQ(g.payoff(0, 0), 0.45);
}

TEST(StageGame, ZeroDiscountIsTheStagePayoff) {
  const StochasticGameSpec spec = tiny_game(0.0, 0.3);
  AggregateVector c(1, 1, 2);
  c.at(0, 0, 0) = 7.0;
  const Eigen::MatrixXd v2 = Eigen::MatrixXd::Constant(1, 1, -3.0);
  EXPECT_DOUBLE_EQ(build_stage_game(spec, 1, c, v2).payoff(0, 0), 0.4);
}

TEST(StageGame, AtomValueEntersThroughAtomMass) {
  const StochasticGameSpec spec = tiny_game(0.5, 0.25);
  AggregateVector c(1, 1, 2);
  c.at(0, 0, 0) = 0.5;
  const Eigen::MatrixXd v2 = Eigen::MatrixXd::Constant(1, 1, 0.8);
  // 0.5 * 0.4 + 0.5 * (0.75 * 0.5 + 0.25 * 0.8)
  EXPECT_DOUBLE_EQ(build_stage_game(spec, 0, c, v2).payoff(0, 0), 0.4875);
}

TEST(StageGame, AffineInAggregates) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const StochasticGameSpec spec = tiny_game(0.7, 0.2);
  AggregateVector c1(1, 1, 2), c2(1, 1, 2), mid(1, 1, 2);
  const Eigen::MatrixXd v2 = Eigen::MatrixXd::Constant(1, 1, 0.1);
  for (int t = 0; t < 50; ++t) {
    const double w = (u(rng) + 1.0) / 2.0;
    for (std::size_t k = 0; k < 2; ++k) {
      c1.values[k] = u(rng);
      c2.values[k] = u(rng);
      mid.values[k] = w * c1.values[k] + (1.0 - w) * c2.values[k];
    }
    const double expected =
        w * build_stage_game(spec, 0, c1, v2).payoff(0, 0) + (1.0 - w) * build_stage_game(spec, 0, c2, v2).payoff(0, 0);
    EXPECT_NEAR(build_stage_game(spec, 0, mid, v2).payoff(0, 0), expected, 1e-14);
  }
}

TEST(Nash, MatchingPennies) {
  const NashSet set = nash_enumerate(bimatrix({{1, -1}, {-1, 1}}, {{-1, 1}, {1, -1}}));
  ASSERT_EQ(set.points.size(), 1u);
  EXPECT_TRUE(contains(set, {vec({0.5, 0.5}), vec({0.5, 0.5})}, 1e-12));
  EXPECT_NEAR(set.points[0].payoff(0), 0.0, 1e-12);
  EXPECT_LE(set.epsilon, 1e-12);
}

TEST(Nash, PrisonersDilemma) {
  const NashSet set = nash_enumerate(bimatrix({{-1, -3}, {0, -2}}, {{-1, 0}, {-3, -2}}));
  ASSERT_EQ(set.points.size(), 1u);
  EXPECT_TRUE(contains(set, {vec({0, 1}), vec({0, 1})}, 1e-12));
  EXPECT_NEAR(set.points[0].payoff(0), -2.0, 1e-12);
}

TEST(Nash, BattleOfTheSexes) {
  const NashSet set = nash_enumerate(bimatrix({{2, 0}, {0, 1}}, {{1, 0}, {0, 2}}));
  ASSERT_EQ(set.points.size(), 3u);
  EXPECT_TRUE(contains(set, {vec({1, 0}), vec({1, 0})}, 1e-12));
  EXPECT_TRUE(contains(set, {vec({0, 1}), vec({0, 1})}, 1e-12));
  EXPECT_TRUE(contains(set, {vec({2.0 / 3, 1.0 / 3}), vec({1.0 / 3, 2.0 / 3})}, 1e-10));
  for (const NashPoint& p : set.points) {
    if (p.strategy[0](0) > 0.0 && p.strategy[0](0) < 1.0) {
      EXPECT_NEAR(p.payoff(0), 2.0 / 3, 1e-10);
      EXPECT_NEAR(p.payoff(1), 2.0 / 3, 1e-10);
    }
  }
}

TEST(Nash, SinglePlayerPicksMaximizers) {
  Eigen::MatrixXd payoff(3, 1);
  payoff << 0.2, 0.9, 0.5;
  const NashSet set = nash_enumerate(StageGame({{0, 1, 2}}, payoff));
  ASSERT_FALSE(set.points.empty());
  for (const NashPoint& p : set.points) EXPECT_DOUBLE_EQ(p.payoff(0), 0.9);
}

// Every equilibrium found is one of the exact rational equilibria, and in
// nondegenerate games the sets coincide.
TEST(NashProperty, AgreesWithRationalEnumeration) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<long long> pay(-5, 5);
  std::uniform_int_distribution<std::size_t> size(2, 4);
  std::size_t compared = 0;
  for (int t = 0; t < 150; ++t) {
    const std::size_t rows = size(rng);
    const std::size_t cols = size(rng);
    std::vector<std::vector<long long>> a(rows, std::vector<long long>(cols)), b = a;
    std::vector<std::vector<double>> ad(rows, std::vector<double>(cols)), bd = ad;
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) {
        a[i][j] = pay(rng);
        b[i][j] = pay(rng);
        ad[i][j] = static_cast<double>(a[i][j]);
        bd[i][j] = static_cast<double>(b[i][j]);
      }
    const auto exact = oracle::bimatrix_equilibria(a, b);
    const NashSet set = nash_enumerate(bimatrix(ad, bd));
    ASSERT_FALSE(set.points.empty());
    for (const NashPoint& p : set.points) {
      EXPECT_LE(deviation_gain(bimatrix(ad, bd), p.strategy), 1e-10);
      if (!exact.complete) continue;
      const bool known = std::any_of(exact.points.begin(), exact.points.end(), [&](const auto& e) {
        for (std::size_t i = 0; i < rows; ++i)
          if (std::abs(oracle::to_double(e.first[i]) - p.strategy[0](static_cast<Eigen::Index>(i))) > 1e-8) return false;
        for (std::size_t j = 0; j < cols; ++j)
          if (std::abs(oracle::to_double(e.second[j]) - p.strategy[1](static_cast<Eigen::Index>(j))) > 1e-8) return false;
        return true;
      });
      EXPECT_TRUE(known) << "game " << t;
    }
    if (exact.complete && !set.degenerate) {
      EXPECT_EQ(set.points.size(), exact.points.size()) << "game " << t;
      ++compared;
    }
  }
  EXPECT_GT(compared, 50u);
}

TEST(NashProperty, ThreePlayerPointsAreEquilibria) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 2 + t % 2;
    std::vector<std::size_t> acts(n);
    for (std::size_t a = 0; a < n; ++a) acts[a] = a;
    const ProfileSpace ps({n, n, n});
    Eigen::MatrixXd payoff(static_cast<Eigen::Index>(ps.size()), 3);
    for (Eigen::Index r = 0; r < payoff.rows(); ++r)
      for (Eigen::Index i = 0; i < 3; ++i) payoff(r, i) = u(rng);
    const StageGame g({acts, acts, acts}, payoff);
    const NashSet set = nash_enumerate(g);
    ASSERT_FALSE(set.points.empty());
    for (const NashPoint& p : set.points) {
      EXPECT_LE(deviation_gain(g, p.strategy), 1e-10);
      EXPECT_TRUE(p.payoff.isApprox(expected_payoff(g, p.strategy), 1e-12));
      for (const Eigen::VectorXd& s : p.strategy) EXPECT_NEAR(s.sum(), 1.0, 1e-12);
    }
  }
}

TEST(Nash, ApproximateModeFindsEpsilonEquilibrium) {
  NashOptions o;
  o.mode = NashMode::Approximate;
  o.approx_epsilon = 1e-3;
  const StageGame g = bimatrix({{1, -1}, {-1, 1}}, {{-1, 1}, {1, -1}});
  const NashSet set = nash_enumerate(g, o);
  ASSERT_EQ(set.points.size(), 1u);
  EXPECT_TRUE(set.approximate);
  EXPECT_LE(deviation_gain(g, set.points[0].strategy), 1e-3);
}
