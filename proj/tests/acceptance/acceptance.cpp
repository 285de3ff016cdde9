// Acceptance run: one PASS/FAIL line per criterion. Arguments select
// criteria by number (all by default). Exit status is 1 when any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "smpe/demos.hpp"
#include "smpe/errors.hpp"
#include "smpe/game/validate.hpp"
#include "smpe/io/files.hpp"
#include "smpe/kernel/generators.hpp"
#include "smpe/kernel/kernel_matrix.hpp"
#include "smpe/measure/operations.hpp"
#include "smpe/solver/solver.hpp"
#include "smpe/stage/nash.hpp"
#include "smpe/verify/certificate.hpp"
#include "support/oracles.hpp"

using namespace smpe;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

constexpr std::uint64_t kNowakSeed = 1000;
constexpr std::size_t kNowakInstances = 50;

// Criterion 2 runs are reused by 8 and 9.
struct NowakRun {
  StochasticGameSpec spec;
  std::optional<EquilibriumResult> result;
  double seconds = 0.0;
};

std::vector<NowakRun>& nowak_runs() {
  static std::vector<NowakRun> runs = [] {
    std::vector<NowakRun> out;
    for (std::size_t t = 0; t < kNowakInstances; ++t) {
      NowakRun run{nowak_instance(kNowakSeed + t), std::nullopt, 0.0};
      const auto t0 = Clock::now();
      try {
        run.result = solve(run.spec);
      } catch (const NoConvergence&) {
      }
      run.seconds = seconds_since(t0);
      out.push_back(std::move(run));
    }
    return out;
  }();
  return runs;
}

StochasticGameSpec static_game(std::mt19937_64& rng, std::size_t a0, std::size_t a1, bool atom) {
  const std::vector<std::vector<std::string>> labels{
      std::vector<std::string>(a0, "a"), std::vector<std::string>(a1, "b")};
  GridSpace space({Cell{1.0, !atom}}, {0});
  StochasticGameSpec spec = make_blank_game({0.0, 0.0}, labels, 1.0, space, 1);
  if (atom) {
    spec.atom_kernel = AtomKernel(1, 1, spec.profile_count());
    for (std::size_t x = 0; x < spec.profile_count(); ++x) spec.atom_kernel.at(0, 0, x) = 1.0;
  } else {
    spec.kernel.rho[0][0] = 1.0;
    for (std::size_t x = 0; x < spec.profile_count(); ++x) spec.kernel.at(0, 0, 0, x) = 1.0;
  }
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& v : spec.payoffs) v = u(rng);
  return spec;
}

Outcome criterion1() {
  std::mt19937_64 rng(1);
  std::size_t ok = 0;
  double worst = 0.0;
  const auto t0 = Clock::now();
  for (std::size_t t = 0; t < 100; ++t) {
    const std::size_t a0 = 2 + t % 2;
    const std::size_t a1 = 2 + (t / 2) % 2;
    const StochasticGameSpec spec = static_game(rng, a0, a1, t % 4 < 2);
    const EquilibriumResult r = solve(spec);
    const AggregateVector c(2, 1, spec.space.coarse_count());
    const Eigen::MatrixXd v2 = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(spec.atoms().size()), 2);
    const NashSet nash = nash_enumerate(build_stage_game(spec, 0, c, v2));
    bool values_are_nash = true;
    for (const SplitPiece& piece : r.value.pieces(0)) {
      double nearest = std::numeric_limits<double>::infinity();
      for (const NashPoint& p : nash.points)
        nearest = std::min(nearest, (p.payoff - piece.value).cwiseAbs().maxCoeff());
      values_are_nash = values_are_nash && nearest <= 1e-10;
    }
    worst = std::max(worst, r.epsilon);
    if (values_are_nash && r.epsilon <= 1e-10) ++ok;
  }
  const double elapsed = seconds_since(t0);
  return {ok == 100 && elapsed < 1.0,
          fmt::format("{}/100 static games at Nash payoffs with eps <= 1e-10 (max eps {:.3g}), {:.3f} s", ok,
                      worst, elapsed)};
}

Outcome criterion2() {
  const auto& runs = nowak_runs();
  std::size_t ok = 0;
  double slowest = 0.0;
  std::size_t max_restarts = 0;
  for (const NowakRun& run : runs) {
    slowest = std::max(slowest, run.seconds);
    if (run.result) max_restarts = std::max(max_restarts, run.result->diagnostics.restarts);
    if (run.result && run.result->epsilon <= 1e-6 && run.seconds < 10.0) ++ok;
  }
  const bool pass = ok * 100 >= 95 * runs.size();
  return {pass, fmt::format("{}/{} Nowak instances with eps <= 1e-6 (max restarts {}, slowest {:.2f} s)", ok,
                            runs.size(), max_restarts, slowest)};
}

// Random divisible-cell purification instance with vprime inside every hull.
PurifyInstance random_divisible_purify(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> cells_d(1, 16), dim_d(1, 3), count_d(1, 5), j_d(1, 3);
  std::uniform_real_distribution<double> u(-1.0, 1.0), mass_d(0.01, 1.0), rho_d(0.0, 2.0);
  const std::size_t n = cells_d(rng);
  const std::size_t dim = dim_d(rng);
  const std::size_t coarse = std::uniform_int_distribution<std::size_t>(1, n)(rng);
  std::vector<Cell> cells;
  std::vector<std::size_t> map;
  for (std::size_t k = 0; k < n; ++k) {
    cells.push_back({mass_d(rng), true});
    map.push_back(k < coarse ? k : std::uniform_int_distribution<std::size_t>(0, coarse - 1)(rng));
  }
  PurifyInstance p;
  p.space = GridSpace(std::move(cells), std::move(map));
  std::vector<std::vector<Eigen::VectorXd>> sets;
  Eigen::MatrixXd target(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<Eigen::VectorXd> set;
    std::vector<double> w;
    double total = 0.0;
    for (std::size_t c = 0, count = count_d(rng); c < count; ++c) {
      Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
      for (Eigen::Index d = 0; d < v.size(); ++d) v(d) = u(rng);
      set.push_back(v);
      w.push_back(mass_d(rng));
      total += w.back();
    }
    Eigen::VectorXd t = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
    for (std::size_t c = 0; c < set.size(); ++c) t += (w[c] / total) * set[c];
    target.row(static_cast<Eigen::Index>(k)) = t.transpose();
    sets.push_back(std::move(set));
  }
  p.candidates = CandidateField(std::move(sets));
  p.vprime = StepFunction(target);
  for (std::size_t j = 0, count = j_d(rng); j < count; ++j) {
    std::vector<double> rho(n);
    for (double& r : rho) r = rho_d(rng);
    p.moments.push_back(StepFunction::scalar(rho));
  }
  return p;
}

Outcome criterion3() {
  std::mt19937_64 rng(3);
  std::size_t exact = 0;
  double worst_gap = 0.0;
  for (std::size_t t = 0; t < 1000; ++t) {
    const PurifyInstance p = random_divisible_purify(rng);
    bool ok = true;
    try {
      const SplitSelection v = purify_selection(p.vprime, p.candidates, p.moments, p.space);
      for (std::size_t k = 0; k < p.space.size(); ++k) {
        for (const SplitPiece& piece : v.pieces(k)) {
          const auto& cands = p.candidates.at(k);
          ok = ok && std::any_of(cands.begin(), cands.end(), [&](const Eigen::VectorXd& c) { return c == piece.value; });
        }
      }
      for (const StepFunction& rho : p.moments) {
        const double gap = (coarse_moments(v, rho, p.space) - coarse_moments(p.vprime, rho, p.space))
                               .cwiseAbs()
                               .maxCoeff();
        worst_gap = std::max(worst_gap, gap);
        ok = ok && gap <= 1e-10;
      }
    } catch (const Error&) {
      ok = false;
    }
    if (ok) ++exact;
  }

  std::vector<oracle::RationalPurify> cases{oracle::rational_single_atom(), oracle::rational_walsh(2),
                                            oracle::rational_walsh(3)};
  std::mt19937_64 orng(33);
  while (cases.size() < 200) cases.push_back(oracle::random_rational_purify(orng, 8, 1 + cases.size() % 3));
  std::size_t agree = 0;
  std::map<oracle::Verdict, std::size_t> seen;
  for (const auto& c : cases) {
    const oracle::Verdict expected = oracle::classify(c);
    ++seen[expected];
    const PurifyInstance p = oracle::to_double(c);
    oracle::Verdict got = oracle::Verdict::Selection;
    try {
      purify_selection(p.vprime, p.candidates, p.moments, p.space);
    } catch (const NoSelection&) {
      got = oracle::Verdict::NoSelection;
    } catch (const InvalidInput&) {
      got = oracle::Verdict::OutsideHull;
    }
    if (got == expected) ++agree;
  }
  return {exact == 1000 && agree == cases.size(),
          fmt::format("{}/1000 exact purifications (max moment gap {:.3g}); oracle agreement {}/{} "
                      "(selection {}, no selection {}, outside hull {})",
                      exact, worst_gap, agree, cases.size(), seen[oracle::Verdict::Selection],
                      seen[oracle::Verdict::NoSelection], seen[oracle::Verdict::OutsideHull])};
}

MixedProfile random_profile(std::mt19937_64& rng, const StochasticGameSpec& spec, std::size_t s) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MixedProfile f;
  for (std::size_t i = 0; i < spec.players(); ++i) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.actions[i].size()));
    for (std::size_t a : spec.feasible[s][i]) p(static_cast<Eigen::Index>(a)) = u(rng);
    f.push_back(p / p.sum());
  }
  return f;
}

Outcome criterion4() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst_excess = -std::numeric_limits<double>::infinity();
  std::size_t inner_ok = 0;
  std::size_t instances = 0;
  std::size_t worst_inner = 0;
  for (std::size_t t = 0; t < 20; ++t) {
    NowakInstanceOptions o;
    o.cells = 8;
    o.atoms = 1 + t % 3;
    o.players = 2 + t % 2;
    const StochasticGameSpec spec = nowak_instance(400 + t, o);
    const double beta = spec.max_discount();
    const std::vector<std::size_t> atoms = spec.atoms();
    std::vector<MixedProfile> f;
    for (std::size_t a : atoms) f.push_back(random_profile(rng, spec, a));
    AggregateVector c(spec.players(), spec.kernel.components, spec.space.coarse_count());
    for (double& v : c.values) v = u(rng) * 0.5;
    const auto rows = static_cast<Eigen::Index>(atoms.size());
    const auto cols = static_cast<Eigen::Index>(spec.players());
    for (std::size_t pair = 0; pair < 100; ++pair) {
      const Eigen::MatrixXd v = Eigen::MatrixXd::NullaryExpr(rows, cols, [&] { return u(rng); });
      const Eigen::MatrixXd w = Eigen::MatrixXd::NullaryExpr(rows, cols, [&] { return u(rng); });
      const double num = (atom_value_operator(f, c, v, spec) - atom_value_operator(f, c, w, spec)).cwiseAbs().maxCoeff();
      const double den = (v - w).cwiseAbs().maxCoeff();
      worst_excess = std::max(worst_excess, num / den - beta);
    }
    const AtomFixedPoint fp = atom_fixed_point(f, c, Eigen::MatrixXd::Zero(rows, cols), spec);
    const double bound = beta == 0.0 ? 1.0 : std::ceil(std::log(1e-10) / std::log(beta)) + 1.0;
    worst_inner = std::max(worst_inner, fp.iterations);
    if (static_cast<double>(fp.iterations) <= bound) ++inner_ok;
    ++instances;
  }
  return {worst_excess <= 1e-12 && inner_ok == instances,
          fmt::format("max(ratio - beta) = {:.3g} over {} pairs; inner loop within bound on {}/{} (max {} iterations)",
                      worst_excess, instances * 100, inner_ok, instances, worst_inner)};
}

Outcome criterion5() {
  bool pass = true;
  std::string detail;
  double slowest = 0.0;
  auto timed = [&](auto&& fn) {
    const auto t0 = Clock::now();
    auto out = fn();
    slowest = std::max(slowest, seconds_since(t0));
    return out;
  };
  for (std::size_t n : {8, 16, 32, 64}) {
    const std::size_t block = n / 2;
    const auto ranks = timed([&] { return block_rank_profile(levy_kernel_matrix(n, block)); });
    const bool full = std::all_of(ranks.begin(), ranks.end(), [&](std::size_t r) { return r == block; });
    pass = pass && full && ranks.size() == 2;
    detail += fmt::format("Levy N={} ranks ({}); ", n, fmt::join(ranks, ","));
  }
  std::size_t coarser_max = 0;
  for (std::size_t t = 0; t < 10; ++t) {
    NowakInstanceOptions o;
    o.cells = 8;
    const StochasticGameSpec ext = sunspot_extend(nowak_instance(500 + t, o), 2);
    std::mt19937_64 rng(500 + t);
    const GameConfig cfg = random_game_config(rng, 2, 2, 12, 0.9);
    const StochasticGameSpec noisy = make_noisy_game(random_noisy_params(rng, 3, 4, 4, t % 2 == 1), cfg);
    for (const StochasticGameSpec* g : {&ext, &noisy}) {
      const auto ranks = timed([&] { return block_rank_profile(kernel_matrix(*g)); });
      coarser_max = std::max(coarser_max, *std::max_element(ranks.begin(), ranks.end()));
    }
  }
  pass = pass && coarser_max <= 1;
  detail += fmt::format("coarser kernels max rank {}; ", coarser_max);
  bool nowak_ok = true;
  for (std::size_t j = 1; j <= 3; ++j) {
    for (std::size_t t = 0; t < 5; ++t) {
      NowakInstanceOptions o;
      o.components = j;
      const auto ranks = timed([&] { return block_rank_profile(kernel_matrix(nowak_instance(600 + 10 * j + t, o))); });
      nowak_ok = nowak_ok && *std::max_element(ranks.begin(), ranks.end()) <= j;
    }
  }
  pass = pass && nowak_ok && slowest < 1.0;
  detail += fmt::format("Nowak ranks <= J: {}; slowest matrix {:.3f} s", nowak_ok ? "yes" : "no", slowest);
  return {pass, detail};
}

Outcome criterion6() {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<std::size_t> size_d(2, 5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t coarser = 0;
  std::size_t splits = 0;
  for (std::size_t t = 0; t < 100; ++t) {
    const std::size_t h = size_d(rng);
    const std::size_t r = size_d(rng);
    const GameConfig cfg = random_game_config(rng, 2, 2, h * r, 0.9);
    const StochasticGameSpec spec = make_noisy_game(random_noisy_params(rng, h, r, 4, t % 2 == 1), cfg);
    if (check_coarser(kernel_matrix(spec)) && validate_game(spec).ok()) ++coarser;
    for (std::size_t s = 0; s < 20; ++s) {
      std::vector<CellPortion> set;
      for (std::size_t k = 0; k < spec.states(); ++k)
        if (u(rng) < 0.5) set.push_back({k, u(rng) * spec.space.mass(k)});
      if (set.empty()) set.push_back({0, spec.space.mass(0)});
      try {
        const HalfSplit split = half_split(set, spec.space);
        const auto whole = coarse_masses(set, spec.space);
        const auto half = coarse_masses(split.half_mass, spec.space);
        bool ok = true;
        for (std::size_t e = 0; e < whole.size(); ++e) ok = ok && std::abs(half[e] - 0.5 * whole[e]) <= 1e-12;
        if (ok) ++splits;
      } catch (const Error&) {
      }
    }
  }
  return {coarser == 100 && splits == 2000,
          fmt::format("{}/100 noisy games coarser; {}/2000 half splits exact", coarser, splits)};
}

Outcome criterion7() {
  const auto t0 = Clock::now();
  const PurifyInstance p = walsh_instance(4);
  bool no_selection = false;
  try {
    purify_selection(p.vprime, p.candidates, p.moments, p.space);
  } catch (const NoSelection&) {
    no_selection = true;
  }
  const std::uint64_t matches = walsh_matching_patterns(4);
  const double elapsed = seconds_since(t0);
  return {no_selection && matches == 0 && elapsed < 5.0,
          fmt::format("purify {}; {} of 65536 sign patterns match; {:.3f} s",
                      no_selection ? "NoSelection" : "found a selection", matches, elapsed)};
}

Outcome criterion8() {
  const auto& runs = nowak_runs();
  std::size_t checks = 0;
  std::size_t inside = 0;
  std::size_t identical = 0;
  std::size_t reruns = 0;
  double worst_z = 0.0;
  for (std::size_t t = 0; t < runs.size(); ++t) {
    if (!runs[t].result || runs[t].result->epsilon > 1e-6) continue;
    const EquilibriumResult& r = *runs[t].result;
    std::mt19937_64 rng(800 + t);
    std::uniform_int_distribution<std::size_t> cell_d(0, runs[t].spec.states() - 1);
    for (std::size_t s = 0; s < 3; ++s) {
      const std::size_t cell = cell_d(rng);
      const std::size_t piece =
          std::uniform_int_distribution<std::size_t>(0, r.value.pieces(cell).size() - 1)(rng);
      SimulationOptions o;
      o.paths = 100000;
      o.seed = 8000 + 10 * t + s;
      const SimulationReport rep = simulate_payoffs(runs[t].spec, r, {cell, piece}, o);
      const Eigen::VectorXd& v = r.value.pieces(cell)[piece].value;
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double z = std::abs(rep.mean(i) - v(i)) / rep.standard_error(i);
        worst_z = std::max(worst_z, z);
        ++checks;
        if (z <= 3.0) ++inside;
      }
      if (s == 0) {
        ++reruns;
        if (serialize_simulation(simulate_payoffs(runs[t].spec, r, {cell, piece}, o)) == serialize_simulation(rep))
          ++identical;
      }
    }
  }
  return {checks > 0 && inside == checks && identical == reruns,
          fmt::format("{}/{} player means within 3 SE (max |z| {:.2f}); {}/{} reruns byte-identical", inside,
                      checks, worst_z, identical, reruns)};
}

Outcome criterion9() {
  const auto& runs = nowak_runs();
  std::size_t valid = 0;
  std::size_t coarser = 0;
  std::size_t solved = 0;
  double worst = 0.0;
  for (const NowakRun& run : runs) {
    const StochasticGameSpec ext = sunspot_extend(run.spec, 2);
    if (validate_game(ext).ok()) ++valid;
    if (check_coarser(kernel_matrix(ext))) ++coarser;
    try {
      const EquilibriumResult r = solve(ext);
      worst = std::max(worst, r.epsilon);
      if (r.epsilon <= 1e-6) ++solved;
    } catch (const NoConvergence& e) {
      worst = std::max(worst, e.best_epsilon());
    }
  }
  const std::size_t n = runs.size();
  return {valid == n && coarser == n && solved == n,
          fmt::format("{}/{} valid, {}/{} coarser, {}/{} solved with eps <= 1e-6 (max eps {:.3g})", valid, n,
                      coarser, n, solved, n, worst)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                       criterion6, criterion7, criterion8, criterion9};
  std::set<std::size_t> chosen;
  for (int a = 1; a < argc; ++a) chosen.insert(static_cast<std::size_t>(std::stoul(argv[a])));
  bool all = true;
  for (std::size_t c = 1; c <= criteria.size(); ++c) {
    if (!chosen.empty() && !chosen.count(c)) continue;
    const auto t0 = Clock::now();
    Outcome out;
    try {
      out = criteria[c - 1]();
    } catch (const std::exception& e) {
      out = {false, fmt::format("unexpected exception: {}", e.what())};
    }
    all = all && out.pass;
    fmt::print("criterion {}: {} ({:.1f} s) {}\n", c, out.pass ? "PASS" : "FAIL", seconds_since(t0), out.detail);
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
