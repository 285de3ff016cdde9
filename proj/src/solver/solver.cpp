#include "smpe/solver/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include <fmt/format.h>

#include "smpe/errors.hpp"
#include "smpe/game/validate.hpp"
#include "smpe/measure/convex_hull.hpp"
#include "smpe/util/parallel.hpp"
#include "smpe/verify/certificate.hpp"

namespace smpe {

MixedProfile to_global(const StageGame& g, const std::vector<Eigen::VectorXd>& local,
                       const StochasticGameSpec& spec) {
  MixedProfile out(g.players());
  for (std::size_t i = 0; i < g.players(); ++i) {
    out[i] = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.actions[i].size()));
    for (std::size_t a = 0; a < g.actions[i].size(); ++a)
      out[i](static_cast<Eigen::Index>(g.actions[i][a])) = local[i](static_cast<Eigen::Index>(a));
  }
  return out;
}

namespace {

std::vector<Eigen::VectorXd> to_local(const StageGame& g, const MixedProfile& global) {
  std::vector<Eigen::VectorXd> out(g.players());
  for (std::size_t i = 0; i < g.players(); ++i) {
    out[i].resize(static_cast<Eigen::Index>(g.actions[i].size()));
    for (std::size_t a = 0; a < g.actions[i].size(); ++a)
      out[i](static_cast<Eigen::Index>(a)) = global[i](static_cast<Eigen::Index>(g.actions[i][a]));
  }
  return out;
}

double sup_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

Eigen::MatrixXd atom_value_operator(const std::vector<MixedProfile>& f, const AggregateVector& c,
                                    const Eigen::MatrixXd& v2, const StochasticGameSpec& spec) {
  const std::vector<std::size_t> atoms = spec.atoms();
  if (f.size() != atoms.size()) throw InvalidInput("atom strategy count does not match the game");
  Eigen::MatrixXd out(v2.rows(), v2.cols());
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    const StageGame g = build_stage_game(spec, atoms[a], c, v2);
    const auto local = to_local(g, f[a]);
    for (std::size_t i = 0; i < spec.players(); ++i)
      out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(i)) = action_values(g, local, i).maxCoeff();
  }
  return out;
}

AtomFixedPoint atom_fixed_point(const std::vector<MixedProfile>& f, const AggregateVector& c,
                                const Eigen::MatrixXd& start, const StochasticGameSpec& spec,
                                double tol, std::size_t max_iter) {
  AtomFixedPoint out{start, 0};
  if (start.rows() == 0) return out;
  const bool static_game = spec.max_discount() == 0.0;
  while (true) {
    Eigen::MatrixXd next = atom_value_operator(f, c, out.values, spec);
    ++out.iterations;
    const double change = sup_distance(next, out.values);
    out.values = std::move(next);
    if (static_game || change <= tol) return out;
    if (out.iterations >= max_iter) {
      throw NoConvergence(fmt::format("atom values still moving by {:.3g} after {} steps", change,
                                      out.iterations),
                          change);
    }
  }
}

namespace {

// Everything needed to purify and report one iterate.
struct Snapshot {
  Eigen::MatrixXd cell_values;  // convexified values, one row per cell
  Eigen::MatrixXd atom_values;
  std::vector<MixedProfile> atom_strategy;
  std::vector<StageGame> games;  // per cell (empty for atomic cells)
  std::vector<NashSet> nash;     // per cell (empty for atomic cells)
};

struct RunOutcome {
  bool converged = false;
  std::size_t iterations = 0;
  double final_change = std::numeric_limits<double>::infinity();
  std::vector<double> history;
  std::size_t max_inner = 0;
  Snapshot snapshot;
};

std::size_t closest_point(const NashSet& set, const Eigen::VectorXd& target) {
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < set.points.size(); ++p) {
    const double d = (set.points[p].payoff - target).norm();
    if (d < best_dist) {
      best_dist = d;
      best = p;
    }
  }
  return best;
}

RunOutcome run(const StochasticGameSpec& spec, const SolveOptions& o, Eigen::MatrixXd v1) {
  const std::size_t n = spec.states();
  const std::size_t m = spec.players();
  const std::vector<std::size_t> atoms = spec.atoms();
  const std::vector<std::size_t> cells = spec.space.divisible_cells();
  Eigen::MatrixXd v2 = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(atoms.size()),
                                             static_cast<Eigen::Index>(m));

  RunOutcome out;
  Snapshot snap;
  snap.games.resize(n);
  snap.nash.resize(n);
  for (std::size_t t = 0; t < o.max_iter; ++t) {
    const AggregateVector c = aggregate(v1, spec);

    // Atoms: equilibrium of each atom game closest to the current atom value,
    // then the atom values that make it a best response.
    snap.atom_strategy.assign(atoms.size(), {});
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      StageGame g = build_stage_game(spec, atoms[a], c, v2);
      NashSet set = nash_enumerate(g, o.nash);
      const std::size_t pick = closest_point(set, v2.row(static_cast<Eigen::Index>(a)).transpose());
      snap.atom_strategy[a] = to_global(g, set.points[pick].strategy, spec);
      snap.games[atoms[a]] = std::move(g);
      snap.nash[atoms[a]] = std::move(set);
    }
    const AtomFixedPoint fixed =
        atom_fixed_point(snap.atom_strategy, c, v2, spec, o.inner_tol, o.inner_max_iter);
    out.max_inner = std::max(out.max_inner, fixed.iterations);
    snap.atom_values = fixed.values;

    // Cells: project the current value onto the hull of equilibrium payoffs.
    snap.cell_values = v1;
    parallel_for(cells.size(), o.threads, [&](std::size_t idx) {
      const std::size_t k = cells[idx];
      StageGame g = build_stage_game(spec, k, c, snap.atom_values);
      NashSet set = nash_enumerate(g, o.nash);
      std::vector<Eigen::VectorXd> payoffs;
      for (const NashPoint& p : set.points) payoffs.push_back(p.payoff);
      snap.cell_values.row(static_cast<Eigen::Index>(k)) =
          project_onto_hull(payoffs, v1.row(static_cast<Eigen::Index>(k)).transpose()).point.transpose();
      snap.games[k] = std::move(g);
      snap.nash[k] = std::move(set);
    });
    for (std::size_t a = 0; a < atoms.size(); ++a)
      snap.cell_values.row(static_cast<Eigen::Index>(atoms[a])) = snap.atom_values.row(static_cast<Eigen::Index>(a));

    const double change = std::max(aggregate(snap.cell_values, spec).distance(c),
                                   sup_distance(snap.atom_values, v2));
    out.history.push_back(change);
    out.iterations = t + 1;
    out.final_change = change;
    if (change <= o.tol) {
      out.converged = true;
      break;
    }
    const double gamma = std::max(o.damping, 1.0 / static_cast<double>(t + 2));
    v1 = (1.0 - gamma) * v1 + gamma * snap.cell_values;
    v2 = (1.0 - gamma) * v2 + gamma * snap.atom_values;
  }
  out.snapshot = std::move(snap);
  return out;
}

EquilibriumResult purify_snapshot(const StochasticGameSpec& spec, const Snapshot& snap,
                                  const SolveOptions& o, SolverDiagnostics& diag) {
  const std::size_t n = spec.states();
  const std::vector<std::size_t> atoms = spec.atoms();
  std::vector<std::size_t> atom_index(n, 0);
  for (std::size_t a = 0; a < atoms.size(); ++a) atom_index[atoms[a]] = a;

  std::vector<std::vector<Eigen::VectorXd>> sets(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (spec.space.divisible(k)) {
      for (const NashPoint& p : snap.nash[k].points) sets[k].push_back(p.payoff);
    } else {
      sets[k].push_back(snap.cell_values.row(static_cast<Eigen::Index>(k)).transpose());
    }
  }
  std::vector<StepFunction> moments;
  for (std::size_t j = 0; j < spec.kernel.components; ++j) moments.push_back(spec.kernel.density(j));
  const StepFunction vprime(snap.cell_values);
  SplitSelection value = purify_selection(vprime, CandidateField(sets), moments, spec.space, o.purify);

  EquilibriumResult result;
  result.strategy.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (const SplitPiece& piece : value.pieces(k)) {
      if (spec.space.divisible(k)) {
        result.strategy[k].push_back(
            to_global(snap.games[k], snap.nash[k].points[piece.tag].strategy, spec));
      } else {
        result.strategy[k].push_back(snap.atom_strategy[atom_index[k]]);
      }
    }
  }

  diag.purification_gap = 0.0;
  for (const StepFunction& rho : moments) {
    const Eigen::MatrixXd a = coarse_moments(value, rho, spec.space);
    const Eigen::MatrixXd b = coarse_moments(vprime, rho, spec.space);
    diag.purification_gap = std::max(diag.purification_gap, sup_distance(a, b));
  }
  diag.degenerate_states = 0;
  for (std::size_t k = 0; k < n; ++k)
    if (snap.nash[k].degenerate) ++diag.degenerate_states;
  diag.pieces_per_cell.clear();
  for (std::size_t k = 0; k < n; ++k) diag.pieces_per_cell.push_back(value.pieces(k).size());
  result.value = std::move(value);
  return result;
}

}  // namespace

EquilibriumResult solve(const StochasticGameSpec& spec, const SolveOptions& options) {
  const ValidationReport report = validate_game(spec);
  if (!report.ok()) throw ValidationError(report);
  if (!report.no_g_atom) {
    throw PreconditionFailed(
        "the decomposed kernel puts density on an atom; only games whose atomless part has no "
        "coarse atom are supported");
  }
  if (!(options.damping > 0.0 && options.damping <= 1.0)) {
    throw InvalidInput("damping must lie in (0, 1]");
  }
  if (options.max_iter == 0) throw InvalidInput("max-iter must be positive");

  const auto n = static_cast<Eigen::Index>(spec.states());
  const auto m = static_cast<Eigen::Index>(spec.players());
  std::optional<EquilibriumResult> best;
  std::size_t total_iterations = 0;
  for (std::size_t r = 0; r <= options.restarts; ++r) {
    Eigen::MatrixXd start = Eigen::MatrixXd::Zero(n, m);
    if (r > 0) {
      std::mt19937_64 rng(options.seed + 0x9E3779B97F4A7C15ull * r);
      std::uniform_real_distribution<double> noise(-spec.payoff_bound, spec.payoff_bound);
      for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index i = 0; i < m; ++i) start(k, i) = noise(rng);
    }
    RunOutcome outcome = run(spec, options, std::move(start));
    total_iterations += outcome.iterations;

    SolverDiagnostics diag;
    EquilibriumResult result = purify_snapshot(spec, outcome.snapshot, options, diag);
    const Certificate cert = deviation_residual(result, spec);
    diag.iterations = outcome.iterations;
    diag.total_iterations = total_iterations;
    diag.restarts = r;
    diag.converged = outcome.converged;
    diag.final_change = outcome.final_change;
    diag.residual_history = std::move(outcome.history);
    diag.max_inner_iterations = outcome.max_inner;
    diag.recursion_gap = cert.recursion_gap;
    result.epsilon = cert.epsilon;
    result.diagnostics = std::move(diag);

    if (result.diagnostics.converged) return result;
    if (!best || result.epsilon < best->epsilon) best = std::move(result);
  }
  throw NoConvergence(fmt::format("no run reached tolerance {:.3g} within {} iterations; best "
                                  "certified epsilon {:.3g}",
                                  options.tol, options.max_iter, best->epsilon),
                      best->epsilon);
}

}  // namespace smpe
