#pragma once

#include <filesystem>
#include <string>

#include "smpe/errors.hpp"
#include "smpe/game/spec.hpp"
#include "smpe/kernel/kernel_matrix.hpp"
#include "smpe/solver/result.hpp"
#include "smpe/verify/certificate.hpp"

namespace smpe {

/// Malformed document. `where` is a line number for syntax errors or a
/// JSON-pointer style key path for schema errors.
class ParseError : public InvalidInput {
 public:
  ParseError(const std::string& where, const std::string& what)
      : InvalidInput(where.empty() ? what : where + ": " + what), where_(where) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

inline constexpr int kGameFileVersion = 1;

/// Game file layout (JSON):
///
///   version, players, discounts[m], payoff_bound, actions[m][labels],
///   grid {cells [{mass, divisible}], coarse [cell -> coarse index]},
///   feasible[state][player][action indices], payoffs[state][profile][player],
///   kernel {J, rho[j][cell], q[j][coarse][state][profile]},
///   atoms {masses[atom], kernel[atom][state][profile]}
///
/// Profiles are numbered with player 0 as the most significant digit.
std::string serialize_game(const StochasticGameSpec& spec);

/// Parses without validating; throws ParseError.
StochasticGameSpec parse_game_text(const std::string& text);

/// Reads, parses and validates a game file. Throws ParseError or
/// ValidationError (carrying the report).
StochasticGameSpec parse_game_spec(const std::filesystem::path& path);

/// Hex SHA-256 of the compact canonical serialization.
std::string spec_hash(const StochasticGameSpec& spec);

/// Result file: spec hash, epsilon and every piece (fraction, tag, value,
/// strategy) with numbers written as 17-significant-digit strings, plus
/// solver diagnostics.
std::string serialize_result(const EquilibriumResult& result, const StochasticGameSpec& spec);

struct LoadedResult {
  std::string spec_hash;
  EquilibriumResult result;
};

/// Parses a result file against the game it claims to belong to. Throws
/// ParseError on malformed input and InvalidInput when the recorded hash
/// does not match `spec`.
LoadedResult parse_result_text(const std::string& text, const StochasticGameSpec& spec);

std::string serialize_certificate(const Certificate& cert);
std::string serialize_simulation(const SimulationReport& report);

/// Dense kernel text format:
///
///   rows R cols C
///   coarse c_0 .. c_{R-1}
///   mass m_0 .. m_{R-1}
///   divisible d_0 .. d_{R-1}        (1 or 0)
///   R lines of C numbers
///
/// Lines starting with '#' are ignored.
std::string serialize_kernel(const KernelMatrix& m);
KernelMatrix parse_kernel_text(const std::string& text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace smpe
