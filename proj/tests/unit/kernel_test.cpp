#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "smpe/demos.hpp"
#include "smpe/errors.hpp"
#include "smpe/game/validate.hpp"
#include "smpe/kernel/generators.hpp"
#include "smpe/kernel/kernel_matrix.hpp"
#include "support/oracles.hpp"

using namespace smpe;

namespace {

// Profile of the Levy game with C and D on the given actions, others on 0.
std::size_t levy_profile(const StochasticGameSpec& spec, std::size_t c, std::size_t d) {
  std::vector<std::size_t> x(spec.players(), 0);
  x[2] = c;
  x[3] = d;
  return spec.profile_space().index(x);
}

}  // namespace

TEST(Levy, UniformShare) {
  EXPECT_EQ(levy_uniform_share(1, 1), 1.0);
  EXPECT_EQ(levy_uniform_share(0, 1), 0.5);
  EXPECT_EQ(levy_uniform_share(1, 0), 0.5);
  EXPECT_EQ(levy_uniform_share(0, 0), 0.0);
}

TEST(Levy, FourCellTransitionMasses) {
  LevyParams p;
  p.cells = 4;
  const StochasticGameSpec spec = make_levy_game(p);
  ASSERT_TRUE(validate_game(spec).ok()) << validate_game(spec).summary();
  const std::size_t x = levy_profile(spec, 1, 1);
  // Source midpoint 1/8: U(1/8, 1) covers 1/8 of cell 0 and all of cells 1..3.
  EXPECT_NEAR(spec.decomposed_mass(0, 0, x), 0.125, 1e-15);
  for (std::size_t k = 1; k < 4; ++k) EXPECT_NEAR(spec.decomposed_mass(k, 0, x), 0.25, 1e-15);
  EXPECT_NEAR(spec.atom_kernel.at(0, 0, x), 0.125, 1e-15);
}

TEST(Levy, CAndDControlTheAtom) {
  LevyParams p;
  p.cells = 8;
  const StochasticGameSpec spec = make_levy_game(p);
  for (std::size_t s = 0; s < spec.states(); ++s) {
    const std::size_t all_atom = levy_profile(spec, 0, 0);
    EXPECT_EQ(spec.atom_kernel.at(0, s, all_atom), 1.0);
    for (std::size_t k = 0; k < 8; ++k) EXPECT_EQ(spec.decomposed_mass(k, s, all_atom), 0.0);
    const std::size_t mixed = levy_profile(spec, 1, 0);
    const std::size_t uniform = levy_profile(spec, 1, 1);
    for (std::size_t k = 0; k < 8; ++k)
      EXPECT_NEAR(spec.decomposed_mass(k, s, mixed), 0.5 * spec.decomposed_mass(k, s, uniform), 1e-15);
  }
}

TEST(Levy, RejectsBadParameters) {
  LevyParams p;
  p.alpha = 0.0;
  EXPECT_THROW(make_levy_game(p), InvalidInput);
  p.alpha = 1.0;
  p.cells = 8;
  p.block_size = 3;
  EXPECT_THROW(make_levy_game(p), InvalidInput);
}

TEST(Levy, BlockRanksAgreeWithElimination) {
  for (std::size_t n : {8, 16, 32}) {
    for (std::size_t block : {n / 4, n / 2}) {
      const KernelMatrix m = levy_kernel_matrix(n, block);
      const auto ranks = block_rank_profile(m);
      ASSERT_EQ(ranks.size(), n / block);
      for (std::size_t b = 0; b < ranks.size(); ++b) {
        const Eigen::MatrixXd rows = m.values.middleRows(static_cast<Eigen::Index>(b * block),
                                                         static_cast<Eigen::Index>(block));
        EXPECT_EQ(ranks[b], oracle::elimination_rank(rows)) << "N=" << n << " block " << b;
        EXPECT_EQ(ranks[b], block);
      }
      EXPECT_FALSE(check_coarser(m));
    }
  }
}

TEST(Nowak, BlockRanksBoundedByComponents) {
  for (std::size_t j = 1; j <= 4; ++j) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      NowakInstanceOptions o;
      o.cells = 12;
      o.components = j;
      o.atoms = seed % 3;
      const StochasticGameSpec spec = nowak_instance(seed, o);
      ASSERT_TRUE(validate_game(spec).ok());
      const KernelMatrix m = kernel_matrix(spec);
      const auto ranks = block_rank_profile(m);
      ASSERT_EQ(ranks.size(), 1u);
      EXPECT_LE(ranks[0], j);
      EXPECT_EQ(ranks[0], oracle::elimination_rank(m.values));
    }
  }
}

TEST(Noisy, KernelIsCoarser) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    const std::size_t h = 2 + seed % 3;
    const std::size_t r = 2 + seed % 4;
    const GameConfig cfg = random_game_config(rng, 2, 2, h * r, 0.9);
    const StochasticGameSpec spec = make_noisy_game(random_noisy_params(rng, h, r, 4, seed % 2 == 1), cfg);
    EXPECT_TRUE(validate_game(spec).ok()) << validate_game(spec).summary();
    const CoarserVerdict v = check_coarser_detail(kernel_matrix(spec));
    EXPECT_TRUE(v.coarser);
    EXPECT_LE(v.max_row_deviation, 1e-12);
    for (std::size_t rank : block_rank_profile(kernel_matrix(spec))) EXPECT_LE(rank, 1u);
  }
}

TEST(Noisy, CellMassesAreProducts) {
  NoisyGameParams p;
  p.kappa = {0.25, 0.75};
  p.nu = {0.5, 0.5};
  p.beta = {{1.0, 1.0}, {1.5, 0.5}};
  p.alpha = [](std::size_t, std::size_t, std::size_t) { return 1.0; };
  GameConfig cfg;
  cfg.discounts = {0.5};
  cfg.actions = {{"a"}};
  const StochasticGameSpec spec = make_noisy_game(p, cfg);
  EXPECT_DOUBLE_EQ(spec.space.mass(0), 0.125);
  EXPECT_DOUBLE_EQ(spec.space.mass(2), 0.5625);
  EXPECT_DOUBLE_EQ(spec.space.mass(3), 0.1875);
  EXPECT_EQ(spec.space.coarse_of(3), 1u);
  EXPECT_TRUE(validate_game(spec).ok());
}

TEST(KernelMatrix, RowsAreDivisibleCellsAndFilterSelectsColumns) {
  NowakInstanceOptions o;
  o.cells = 5;
  o.atoms = 2;
  const StochasticGameSpec spec = nowak_instance(7, o);
  const KernelMatrix all = kernel_matrix(spec);
  EXPECT_EQ(all.values.rows(), 5);
  EXPECT_EQ(all.targets, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  EXPECT_EQ(static_cast<std::size_t>(all.values.cols()), spec.states() * spec.profile_count());
  const KernelMatrix some = kernel_matrix(spec, [](std::size_t s, std::size_t) { return s == 0; });
  EXPECT_EQ(static_cast<std::size_t>(some.values.cols()), spec.profile_count());
  for (Eigen::Index c = 0; c < some.values.cols(); ++c) EXPECT_EQ(some.values.col(c), all.values.col(c));
}

TEST(KernelMatrix, CoarserDetectsRowMismatch) {
  std::mt19937_64 rng(3);
  const GameConfig cfg = random_game_config(rng, 2, 2, 6, 0.9);
  KernelMatrix m = kernel_matrix(make_noisy_game(random_noisy_params(rng, 2, 3, 4, false), cfg));
  EXPECT_TRUE(check_coarser(m));
  m.values(2, 0) += 0.01;
  const CoarserVerdict v = check_coarser_detail(m);
  EXPECT_FALSE(v.coarser);
  EXPECT_NEAR(v.max_row_deviation, 0.01, 1e-12);
}
