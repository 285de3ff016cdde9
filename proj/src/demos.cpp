#include "smpe/demos.hpp"

#include <bit>
#include <random>

#include <fmt/format.h>

#include "smpe/errors.hpp"
#include "smpe/kernel/generators.hpp"

namespace smpe {

StochasticGameSpec nowak_instance(std::uint64_t seed, const NowakInstanceOptions& o) {
  std::mt19937_64 rng(seed);
  const std::size_t states = o.cells + o.atoms;
  GameConfig config = random_game_config(rng, o.players, o.actions, states, o.max_discount);
  std::size_t profiles = 1;
  for (std::size_t i = 0; i < o.players; ++i) profiles *= o.actions;
  const NowakParams params = random_nowak_params(rng, o.cells, o.components, o.atoms, profiles);
  return make_nowak_game(params, config);
}

namespace {

int walsh(std::size_t n, std::size_t c) { return std::popcount(n & c) % 2 == 0 ? 1 : -1; }

void require_walsh_order(std::size_t k) {
  if (k < 1 || k > 4) throw InvalidInput(fmt::format("Walsh order k = {} outside 1..4", k));
}

}  // namespace

PurifyInstance walsh_instance(std::size_t k) {
  require_walsh_order(k);
  const std::size_t n = std::size_t{1} << k;
  std::vector<Cell> cells(n, Cell{1.0 / static_cast<double>(n), false});
  PurifyInstance out;
  out.space = GridSpace(std::move(cells), std::vector<std::size_t>(n, 0));
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> rho(n);
    for (std::size_t c = 0; c < n; ++c) rho[c] = walsh(j, c) + 1.0;
    out.moments.push_back(StepFunction::scalar(rho));
  }
  const std::vector<Eigen::VectorXd> signs{Eigen::VectorXd::Constant(1, -1.0),
                                           Eigen::VectorXd::Constant(1, 1.0)};
  out.candidates = CandidateField(std::vector<std::vector<Eigen::VectorXd>>(n, signs));
  out.vprime = StepFunction(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), 1));
  return out;
}

std::uint64_t walsh_matching_patterns(std::size_t k) {
  require_walsh_order(k);
  const std::size_t n = std::size_t{1} << k;
  const std::uint64_t patterns = std::uint64_t{1} << n;
  std::uint64_t matches = 0;
  // Bit c of the pattern selects +1 on cell c. With equal masses, moment j
  // matches vprime = 0 iff sum_c (w_j(c) + 1) g_c = 0.
  for (std::uint64_t pattern = 0; pattern < patterns; ++pattern) {
    bool ok = true;
    for (std::size_t j = 0; j < n && ok; ++j) {
      long moment = 0;
      for (std::size_t c = 0; c < n; ++c) {
        const long g = (pattern >> c) & 1U ? 1 : -1;
        moment += (walsh(j, c) + 1) * g;
      }
      ok = moment == 0;
    }
    if (ok) ++matches;
  }
  return matches;
}

AtomInstance single_atom_instance() {
  AtomInstance out;
  PurifyInstance& p = out.purify;
  p.space = GridSpace({Cell{0.5, false}, Cell{0.5, true}}, {0, 1});
  p.moments.push_back(StepFunction::scalar(std::vector<double>{1.0, 1.0}));
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
  p.candidates = CandidateField({{zero, one}, {zero}});
  p.vprime = StepFunction::scalar(std::vector<double>{0.5, 0.0});
  out.atom_set = {CellPortion{0, 0.5}};
  return out;
}

KernelMatrix levy_kernel_matrix(std::size_t cells, std::size_t block, double alpha) {
  LevyParams p;
  p.alpha = alpha;
  p.cells = cells;
  p.block_size = block;
  const StochasticGameSpec spec = make_levy_game(p);
  const ProfileSpace ps = spec.profile_space();
  constexpr std::size_t kC = 2;
  constexpr std::size_t kD = 3;
  constexpr std::size_t kMinusOne = 1;
  return kernel_matrix(spec, [&](std::size_t s, std::size_t x) {
    if (s >= cells) return false;
    for (std::size_t i = 0; i < spec.players(); ++i) {
      const std::size_t want = (i == kC || i == kD) ? kMinusOne : 0;
      if (ps.action_of(x, i) != want) return false;
    }
    return true;
  });
}

}  // namespace smpe
