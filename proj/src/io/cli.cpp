#include "smpe/io/cli.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "smpe/demos.hpp"
#include "smpe/errors.hpp"
#include "smpe/game/validate.hpp"
#include "smpe/io/files.hpp"
#include "smpe/kernel/generators.hpp"
#include "smpe/kernel/kernel_matrix.hpp"
#include "smpe/measure/operations.hpp"
#include "smpe/solver/solver.hpp"
#include "smpe/util/parallel.hpp"
#include "smpe/verify/certificate.hpp"

namespace smpe {
namespace {

struct SolveArgs {
  SolveOptions options;
  std::string out;
};

void add_solve_flags(CLI::App* cmd, SolveArgs& args, const std::string& seed_flag = "--seed") {
  SolveOptions& o = args.options;
  cmd->add_option("--tol", o.tol, "outer stopping tolerance")->capture_default_str();
  cmd->add_option("--max-iter", o.max_iter, "outer iterations per run")->capture_default_str();
  cmd->add_option("--damping", o.damping, "floor of the damping step")->capture_default_str();
  cmd->add_option("--restarts", o.restarts, "extra runs from seeded starts")->capture_default_str();
  cmd->add_option(seed_flag, o.seed, "seed of the restart noise")->capture_default_str();
  cmd->add_option("--threads", o.threads, "worker threads (default: SMPE_THREADS or all cores)");
  cmd->add_option("--out", args.out, "write the result file here");
}

std::string list(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::to_string(v[k]);
  return s;
}

void print_solution(std::ostream& out, const EquilibriumResult& r) {
  const SolverDiagnostics& d = r.diagnostics;
  fmt::print(out, "epsilon {:.17g}\n", r.epsilon);
  fmt::print(out, "recursion_gap {:.6g}\n", d.recursion_gap);
  fmt::print(out, "purification_gap {:.6g}\n", d.purification_gap);
  fmt::print(out, "iterations {}\n", d.iterations);
  fmt::print(out, "total_iterations {}\n", d.total_iterations);
  fmt::print(out, "restarts {}\n", d.restarts);
  fmt::print(out, "max_inner_iterations {}\n", d.max_inner_iterations);
  fmt::print(out, "degenerate_states {}\n", d.degenerate_states);
}

EquilibriumResult solve_and_save(const StochasticGameSpec& spec, const SolveArgs& args, std::ostream& out) {
  EquilibriumResult r = solve(spec, args.options);
  if (!args.out.empty()) write_file(args.out, serialize_result(r, spec));
  print_solution(out, r);
  return r;
}

void print_kernel_analysis(std::ostream& out, const KernelMatrix& m, double threshold) {
  const auto ranks = block_rank_profile(m, threshold);
  const CoarserVerdict v = check_coarser_detail(m);
  fmt::print(out, "block\trank\n");
  for (std::size_t e = 0; e < ranks.size(); ++e) fmt::print(out, "{}\t{}\n", e, ranks[e]);
  fmt::print(out, "max_row_deviation {:.6g}\n", v.max_row_deviation);
  fmt::print(out, "verdict {}\n", v.coarser ? "coarser" : "not coarser");
}

KernelMatrix load_kernel(const std::string& path) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    StochasticGameSpec spec = parse_game_text(text);
    require_consistent_dimensions(spec);
    return kernel_matrix(spec);
  }
  return parse_kernel_text(text);
}

int demo_levy(std::ostream& out, const std::vector<std::size_t>& sizes, double alpha, double threshold) {
  fmt::print(out, "cells\tblock\tblocks\tmin_rank\tmax_rank\tfull_rank\tcoarser\n");
  for (std::size_t n : sizes) {
    for (std::size_t divisor : {2, 4}) {
      if (n % divisor != 0 || n / divisor == 0) continue;
      const std::size_t block = n / divisor;
      const KernelMatrix m = levy_kernel_matrix(n, block, alpha);
      const auto ranks = block_rank_profile(m, threshold);
      const auto [lo, hi] = std::minmax_element(ranks.begin(), ranks.end());
      const bool full = std::all_of(ranks.begin(), ranks.end(), [&](std::size_t r) { return r == block; });
      fmt::print(out, "{}\t{}\t{}\t{}\t{}\t{}\t{}\n", n, block, ranks.size(), *lo, *hi, full ? "yes" : "no",
                 check_coarser(m) ? "yes" : "no");
    }
  }
  return kExitOk;
}

int demo_noisy(std::ostream& out, std::uint64_t seed, std::size_t h, std::size_t r, bool tilted,
               std::size_t sets, const SolveArgs& args) {
  std::mt19937_64 rng(seed);
  const std::size_t states = h * r;
  const GameConfig config = random_game_config(rng, 2, 2, states, 0.9);
  const StochasticGameSpec spec = make_noisy_game(random_noisy_params(rng, h, r, 4, tilted), config);
  fmt::print(out, "states {}\n", states);
  fmt::print(out, "validation {}\n", validate_game(spec).ok() ? "ok" : "failed");
  print_kernel_analysis(out, kernel_matrix(spec), 1e-8);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t passed = 0;
  for (std::size_t t = 0; t < sets; ++t) {
    std::vector<CellPortion> set;
    for (std::size_t k = 0; k < states; ++k)
      if (unit(rng) < 0.5) set.push_back({k, unit(rng) * spec.space.mass(k)});
    if (set.empty()) set.push_back({0, spec.space.mass(0)});
    const HalfSplit split = half_split(set, spec.space);
    const auto whole = coarse_masses(set, spec.space);
    const auto half = coarse_masses(split.half_mass, spec.space);
    bool ok = true;
    for (std::size_t e = 0; e < whole.size(); ++e) ok = ok && std::abs(half[e] - 0.5 * whole[e]) <= 1e-12;
    if (ok) ++passed;
  }
  fmt::print(out, "half_split {}/{}\n", passed, sets);
  solve_and_save(spec, args, out);
  return passed == sets ? kExitOk : kExitInternal;
}

int demo_sunspot(std::ostream& out, std::uint64_t seed, std::size_t cells, std::size_t sunspots,
                 const SolveArgs& args) {
  NowakInstanceOptions o;
  o.cells = cells;
  const StochasticGameSpec base = nowak_instance(seed, o);
  const StochasticGameSpec ext = sunspot_extend(base, sunspots);
  fmt::print(out, "states {} -> {}\n", base.states(), ext.states());
  fmt::print(out, "validation {}\n", validate_game(ext).ok() ? "ok" : "failed");
  print_kernel_analysis(out, kernel_matrix(ext), 1e-8);
  solve_and_save(ext, args, out);
  return kExitOk;
}

int demo_prop2(std::ostream& out) {
  const AtomInstance inst = single_atom_instance();
  const PurifyInstance& p = inst.purify;
  fmt::print(out, "g_atom {}\n", is_g_atom(inst.atom_set, p.space).atom ? "yes" : "no");
  try {
    purify_selection(p.vprime, p.candidates, p.moments, p.space);
    fmt::print(out, "purify selection found\n");
    return kExitInternal;
  } catch (const NoSelection&) {
    fmt::print(out, "purify NoSelection\n");
  }
  try {
    half_split(inst.atom_set, p.space);
    fmt::print(out, "half_split succeeded\n");
    return kExitInternal;
  } catch (const AtomicMass&) {
    fmt::print(out, "half_split AtomicMass\n");
  }
  return kExitOk;
}

int demo_prop3(std::ostream& out, std::size_t k) {
  const PurifyInstance p = walsh_instance(k);
  fmt::print(out, "cells {}\n", p.space.size());
  bool no_selection = false;
  try {
    purify_selection(p.vprime, p.candidates, p.moments, p.space);
    fmt::print(out, "purify selection found\n");
  } catch (const NoSelection&) {
    no_selection = true;
    fmt::print(out, "purify NoSelection\n");
  }
  const std::uint64_t patterns = std::uint64_t{1} << p.space.size();
  const std::uint64_t matches = walsh_matching_patterns(k);
  if (matches == 0) {
    fmt::print(out, "NoSelection confirmed by exhaustive search ({} patterns)\n", patterns);
  } else {
    fmt::print(out, "exhaustive search found {} matching patterns out of {}\n", matches, patterns);
  }
  return no_selection && matches == 0 ? kExitOk : kExitInternal;
}

}  // namespace

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stationary Markov perfect equilibria of stochastic games on grids", "smpe"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  solve_args.options.threads = default_threads();
  std::string game_path;
  std::string result_path;

  auto* solve_cmd = app.add_subcommand("solve", "solve a game file");
  solve_cmd->add_option("--game", game_path, "game file")->required();
  add_solve_flags(solve_cmd, solve_args);

  std::string cert_path;
  auto* verify_cmd = app.add_subcommand("verify", "certify a result against its game");
  verify_cmd->add_option("--game", game_path, "game file")->required();
  verify_cmd->add_option("--result", result_path, "result file")->required();
  verify_cmd->add_option("--out", cert_path, "write the certificate here");

  SimulationOptions sim;
  sim.threads = default_threads();
  PieceRef start;
  std::optional<std::size_t> horizon;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo payoffs of a result");
  sim_cmd->add_option("--game", game_path, "game file")->required();
  sim_cmd->add_option("--result", result_path, "result file")->required();
  sim_cmd->add_option("--paths", sim.paths, "simulated paths")->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed, "stream seed")->capture_default_str();
  sim_cmd->add_option("--truncation", sim.truncation, "bound on the discarded tail")->capture_default_str();
  sim_cmd->add_option("--horizon", horizon, "periods (chosen from --truncation when absent)");
  sim_cmd->add_option("--start-cell", start.cell, "initial cell")->capture_default_str();
  sim_cmd->add_option("--start-piece", start.piece, "initial piece of that cell")->capture_default_str();
  sim_cmd->add_option("--threads", sim.threads, "worker threads");

  std::string kernel_path;
  double threshold = 1e-8;
  auto* analyze_cmd = app.add_subcommand("analyze", "block ranks and coarseness of a kernel");
  analyze_cmd->add_option("--kernel", kernel_path, "kernel text file or game file")->required();
  analyze_cmd->add_option("--threshold", threshold, "singular value cutoff")->capture_default_str();

  auto* demo_cmd = app.add_subcommand("demo", "generated instances and tables");
  demo_cmd->require_subcommand(1);
  std::uint64_t seed = 0;
  std::vector<std::size_t> levy_sizes{8, 16, 32, 64};
  double alpha = 1.0;
  auto* levy_cmd = demo_cmd->add_subcommand("levy", "block rank versus refinement");
  levy_cmd->add_option("--cells", levy_sizes, "grid sizes")->delimiter(',')->capture_default_str();
  levy_cmd->add_option("--alpha", alpha, "uniform share")->capture_default_str();
  levy_cmd->add_option("--threshold", threshold, "singular value cutoff")->capture_default_str();

  NowakInstanceOptions nowak;
  std::string save_game;
  auto* nowak_cmd = demo_cmd->add_subcommand("nowak", "solve a random Nowak-class game");
  nowak_cmd->add_option("--seed", seed, "instance seed")->capture_default_str();
  nowak_cmd->add_option("--cells", nowak.cells, "divisible cells")->capture_default_str();
  nowak_cmd->add_option("--components", nowak.components, "atomless components J")->capture_default_str();
  nowak_cmd->add_option("--atoms", nowak.atoms, "atoms K")->capture_default_str();
  nowak_cmd->add_option("--max-discount", nowak.max_discount, "upper bound on discounts")->capture_default_str();
  nowak_cmd->add_option("--save-game", save_game, "write the generated game here");
  SolveArgs demo_solve;
  demo_solve.options.threads = default_threads();
  add_solve_flags(nowak_cmd, demo_solve, "--solve-seed");

  std::size_t h_cells = 3;
  std::size_t r_cells = 4;
  bool tilted = false;
  std::size_t sets = 20;
  auto* noisy_cmd = demo_cmd->add_subcommand("noisy", "coarser kernel of a random noisy game");
  noisy_cmd->add_option("--seed", seed, "instance seed")->capture_default_str();
  noisy_cmd->add_option("--h-cells", h_cells, "H cells")->capture_default_str();
  noisy_cmd->add_option("--r-cells", r_cells, "R cells")->capture_default_str();
  noisy_cmd->add_flag("--tilted", tilted, "noise density depends on h");
  noisy_cmd->add_option("--sets", sets, "random sets to half-split")->capture_default_str();
  add_solve_flags(noisy_cmd, demo_solve, "--solve-seed");

  std::size_t sunspot_cells = 8;
  std::size_t sunspots = 2;
  auto* sunspot_cmd = demo_cmd->add_subcommand("sunspot", "solve a sunspot extension of a Nowak game");
  sunspot_cmd->add_option("--seed", seed, "instance seed")->capture_default_str();
  sunspot_cmd->add_option("--cells", sunspot_cells, "divisible cells of the base game")->capture_default_str();
  sunspot_cmd->add_option("--sunspots", sunspots, "sunspot cells per cell")->capture_default_str();
  add_solve_flags(sunspot_cmd, demo_solve, "--solve-seed");

  auto* prop2_cmd = demo_cmd->add_subcommand("prop2", "purification fails on a single atom");
  std::size_t walsh_k = 4;
  auto* prop3_cmd = demo_cmd->add_subcommand("prop3", "purification fails on a Walsh system");
  prop3_cmd->add_option("--k", walsh_k, "2^k atomic cells")->capture_default_str()->check(CLI::Range(1, 4));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*solve_cmd) {
      const StochasticGameSpec spec = parse_game_spec(game_path);
      solve_and_save(spec, solve_args, out);
      return kExitOk;
    }
    if (*verify_cmd) {
      const StochasticGameSpec spec = parse_game_spec(game_path);
      const LoadedResult loaded = parse_result_text(read_file(result_path), spec);
      const Certificate cert = deviation_residual(loaded.result, spec);
      fmt::print(out, "epsilon {:.17g}\n", cert.epsilon);
      fmt::print(out, "recursion_gap {:.6g}\n", cert.recursion_gap);
      if (!cert_path.empty()) write_file(cert_path, serialize_certificate(cert));
      return kExitOk;
    }
    if (*sim_cmd) {
      const StochasticGameSpec spec = parse_game_spec(game_path);
      const LoadedResult loaded = parse_result_text(read_file(result_path), spec);
      sim.horizon = horizon;
      out << serialize_simulation(simulate_payoffs(spec, loaded.result, start, sim));
      return kExitOk;
    }
    if (*analyze_cmd) {
      print_kernel_analysis(out, load_kernel(kernel_path), threshold);
      return kExitOk;
    }
    if (*levy_cmd) return demo_levy(out, levy_sizes, alpha, threshold);
    if (*nowak_cmd) {
      const StochasticGameSpec spec = nowak_instance(seed, nowak);
      if (!save_game.empty()) write_file(save_game, serialize_game(spec));
      fmt::print(out, "states {}\n", spec.states());
      fmt::print(out, "block_ranks {}\n", list(block_rank_profile(kernel_matrix(spec))));
      solve_and_save(spec, demo_solve, out);
      return kExitOk;
    }
    if (*noisy_cmd) return demo_noisy(out, seed, h_cells, r_cells, tilted, sets, demo_solve);
    if (*sunspot_cmd) return demo_sunspot(out, seed, sunspot_cells, sunspots, demo_solve);
    if (*prop2_cmd) return demo_prop2(out);
    if (*prop3_cmd) return demo_prop3(out, walsh_k);
  } catch (const NoConvergence& e) {
    fmt::print(err, "error: {} (best epsilon {:.6g})\n", e.what(), e.best_epsilon());
    return kExitNoConvergence;
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    fmt::print(err, "internal error: {}\n", e.what());
    return kExitInternal;
  }
  return kExitInput;
}

}  // namespace smpe
