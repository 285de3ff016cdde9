#include "smpe/io/files.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "json.hpp"
#include "smpe/game/validate.hpp"

namespace smpe {

using nlohmann::json;

namespace {

// Walks a parsed document while remembering the key path for error messages.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  Node operator[](const char* key) const {
    if (!j_.is_object()) fail("expected an object");
    const auto it = j_.find(key);
    if (it == j_.end()) throw ParseError(path_ + "/" + key, "missing key");
    return Node(*it, path_ + "/" + key);
  }
  Node operator[](std::size_t idx) const {
    return Node(j_.at(idx), fmt::format("{}/{}", path_, idx));
  }
  bool has(const char* key) const { return j_.is_object() && j_.contains(key); }

  std::size_t size() const {
    if (!j_.is_array()) fail("expected an array");
    return j_.size();
  }
  std::size_t size(std::size_t expected) const {
    const std::size_t n = size();
    if (n != expected) fail(fmt::format("expected {} entries, found {}", expected, n));
    return n;
  }
  double number() const {
    if (!j_.is_number()) fail("expected a number");
    const double v = j_.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }
  /// Number written as a decimal string.
  double decimal() const {
    if (!j_.is_string()) fail("expected a decimal string");
    const std::string& s = j_.get_ref<const std::string&>();
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      fail(fmt::format("'{}' is not a number", s));
    }
    if (used != s.size() || !std::isfinite(v)) fail(fmt::format("'{}' is not a finite number", s));
    return v;
  }
  std::size_t index() const {
    if (!j_.is_number_unsigned() && !(j_.is_number_integer() && j_.get<long long>() >= 0)) {
      fail("expected a nonnegative integer");
    }
    return j_.get<std::size_t>();
  }
  bool boolean() const {
    if (!j_.is_boolean()) fail("expected true or false");
    return j_.get<bool>();
  }
  std::string string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(path_.empty() ? "/" : path_, what); }

 private:
  const json& j_;
  std::string path_;
};

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ParseError(fmt::format("line {}", line), "malformed JSON");
  }
}

std::string decimal(double v) { return fmt::format("{:.17g}", v); }

json game_json(const StochasticGameSpec& spec) {
  const std::size_t n = spec.states();
  const std::size_t m = spec.players();
  const std::size_t profiles = spec.profile_count();
  json j;
  j["version"] = kGameFileVersion;
  j["players"] = m;
  j["discounts"] = spec.discounts;
  j["payoff_bound"] = spec.payoff_bound;
  j["actions"] = spec.actions;
  json cells = json::array();
  for (const Cell& c : spec.space.cells()) cells.push_back({{"mass", c.mass}, {"divisible", c.divisible}});
  j["grid"] = {{"cells", cells}, {"coarse", spec.space.coarse_map()}};
  j["feasible"] = spec.feasible;
  json payoffs = json::array();
  for (std::size_t s = 0; s < n; ++s) {
    json per_state = json::array();
    for (std::size_t x = 0; x < profiles; ++x) {
      json u = json::array();
      for (std::size_t i = 0; i < m; ++i) u.push_back(spec.payoff(s, x, i));
      per_state.push_back(std::move(u));
    }
    payoffs.push_back(std::move(per_state));
  }
  j["payoffs"] = std::move(payoffs);

  const KernelDecomposition& kd = spec.kernel;
  json q = json::array();
  for (std::size_t c = 0; c < kd.components; ++c) {
    json per_j = json::array();
    for (std::size_t e = 0; e < kd.coarse_cells; ++e) {
      json per_e = json::array();
      for (std::size_t s = 0; s < n; ++s) {
        json row = json::array();
        for (std::size_t x = 0; x < profiles; ++x) row.push_back(kd.at(c, e, s, x));
        per_e.push_back(std::move(row));
      }
      per_j.push_back(std::move(per_e));
    }
    q.push_back(std::move(per_j));
  }
  j["kernel"] = {{"J", kd.components}, {"rho", kd.rho}, {"q", std::move(q)}};

  const std::vector<std::size_t> atoms = spec.atoms();
  json masses = json::array();
  json ak = json::array();
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    masses.push_back(spec.space.mass(atoms[a]));
    json per_a = json::array();
    for (std::size_t s = 0; s < n; ++s) {
      json row = json::array();
      for (std::size_t x = 0; x < profiles; ++x) row.push_back(spec.atom_kernel.at(a, s, x));
      per_a.push_back(std::move(row));
    }
    ak.push_back(std::move(per_a));
  }
  j["atoms"] = {{"masses", std::move(masses)}, {"kernel", std::move(ak)}};
  return j;
}

}  // namespace

std::string serialize_game(const StochasticGameSpec& spec) {
  require_consistent_dimensions(spec);
  return game_json(spec).dump(1) + "\n";
}

StochasticGameSpec parse_game_text(const std::string& text) {
  const json doc = parse_json(text);
  const Node root(doc, "");
  if (root["version"].index() != static_cast<std::size_t>(kGameFileVersion)) {
    root["version"].fail(fmt::format("unsupported version (expected {})", kGameFileVersion));
  }
  const std::size_t m = root["players"].index();
  if (m == 0) root["players"].fail("a game needs at least one player");

  std::vector<double> discounts;
  for (std::size_t i = 0; i < root["discounts"].size(m); ++i) discounts.push_back(root["discounts"][i].number());
  std::vector<std::vector<std::string>> actions(m);
  for (std::size_t i = 0; i < root["actions"].size(m); ++i) {
    const Node labels = root["actions"][i];
    for (std::size_t a = 0; a < labels.size(); ++a) actions[i].push_back(labels[a].string());
    if (actions[i].empty()) labels.fail("player has no actions");
  }
  const double bound = root["payoff_bound"].number();

  const Node grid = root["grid"];
  const std::size_t n = grid["cells"].size();
  std::vector<Cell> cells;
  std::vector<std::size_t> coarse;
  for (std::size_t k = 0; k < n; ++k) {
    const Node c = grid["cells"][k];
    cells.push_back({c["mass"].number(), c["divisible"].boolean()});
  }
  for (std::size_t k = 0; k < grid["coarse"].size(n); ++k) coarse.push_back(grid["coarse"][k].index());
  GridSpace space;
  try {
    space = GridSpace(std::move(cells), std::move(coarse));
  } catch (const InvalidInput& e) {
    grid.fail(e.what());
  }

  const Node kernel = root["kernel"];
  const std::size_t j_count = kernel["J"].index();
  if (j_count == 0) kernel["J"].fail("kernel needs at least one component");
  StochasticGameSpec spec = make_blank_game(std::move(discounts), std::move(actions), bound,
                                            std::move(space), j_count);
  const std::size_t profiles = spec.profile_count();
  const std::size_t e_count = spec.space.coarse_count();

  const Node feasible = root["feasible"];
  for (std::size_t s = 0; s < feasible.size(n); ++s) {
    for (std::size_t i = 0; i < feasible[s].size(m); ++i) {
      const Node list = feasible[s][i];
      spec.feasible[s][i].clear();
      for (std::size_t a = 0; a < list.size(); ++a) {
        const std::size_t act = list[a].index();
        if (act >= spec.actions[i].size()) list[a].fail("unknown action");
        spec.feasible[s][i].push_back(act);
      }
    }
  }
  const Node payoffs = root["payoffs"];
  for (std::size_t s = 0; s < payoffs.size(n); ++s)
    for (std::size_t x = 0; x < payoffs[s].size(profiles); ++x)
      for (std::size_t i = 0; i < payoffs[s][x].size(m); ++i) spec.payoff(s, x, i) = payoffs[s][x][i].number();

  const Node rho = kernel["rho"];
  for (std::size_t c = 0; c < rho.size(j_count); ++c)
    for (std::size_t k = 0; k < rho[c].size(n); ++k) spec.kernel.rho[c][k] = rho[c][k].number();
  const Node q = kernel["q"];
  for (std::size_t c = 0; c < q.size(j_count); ++c)
    for (std::size_t e = 0; e < q[c].size(e_count); ++e)
      for (std::size_t s = 0; s < q[c][e].size(n); ++s)
        for (std::size_t x = 0; x < q[c][e][s].size(profiles); ++x)
          spec.kernel.at(c, e, s, x) = q[c][e][s][x].number();

  const Node atoms = root["atoms"];
  const std::vector<std::size_t> atom_cells = spec.atoms();
  const Node masses = atoms["masses"];
  for (std::size_t a = 0; a < masses.size(atom_cells.size()); ++a) {
    if (masses[a].number() != spec.space.mass(atom_cells[a])) {
      masses[a].fail("atom mass differs from its grid cell");
    }
  }
  const Node ak = atoms["kernel"];
  for (std::size_t a = 0; a < ak.size(atom_cells.size()); ++a)
    for (std::size_t s = 0; s < ak[a].size(n); ++s)
      for (std::size_t x = 0; x < ak[a][s].size(profiles); ++x)
        spec.atom_kernel.at(a, s, x) = ak[a][s][x].number();
  return spec;
}

StochasticGameSpec parse_game_spec(const std::filesystem::path& path) {
  StochasticGameSpec spec = parse_game_text(read_file(path));
  ValidationReport report = validate_game(spec);
  if (!report.ok()) throw ValidationError(std::move(report));
  return spec;
}

std::string spec_hash(const StochasticGameSpec& spec) {
  const std::string canonical = game_json(spec).dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(canonical.data(), canonical.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  std::string hex;
  for (unsigned int b = 0; b < length; ++b) hex += fmt::format("{:02x}", digest[b]);
  return hex;
}

std::string serialize_result(const EquilibriumResult& result, const StochasticGameSpec& spec) {
  json j;
  j["version"] = kGameFileVersion;
  j["spec_hash"] = spec_hash(spec);
  j["epsilon"] = decimal(result.epsilon);
  json cells = json::array();
  for (std::size_t k = 0; k < result.value.size(); ++k) {
    json pieces = json::array();
    const auto ps = result.value.pieces(k);
    for (std::size_t p = 0; p < ps.size(); ++p) {
      json value = json::array();
      for (Eigen::Index i = 0; i < ps[p].value.size(); ++i) value.push_back(decimal(ps[p].value(i)));
      json strategy = json::array();
      for (const Eigen::VectorXd& mix : result.strategy[k][p]) {
        json probs = json::array();
        for (Eigen::Index a = 0; a < mix.size(); ++a) probs.push_back(decimal(mix(a)));
        strategy.push_back(std::move(probs));
      }
      pieces.push_back({{"fraction", decimal(ps[p].fraction)},
                        {"tag", ps[p].tag},
                        {"value", std::move(value)},
                        {"strategy", std::move(strategy)}});
    }
    cells.push_back(std::move(pieces));
  }
  j["cells"] = std::move(cells);
  const SolverDiagnostics& d = result.diagnostics;
  j["diagnostics"] = {{"iterations", d.iterations},
                      {"total_iterations", d.total_iterations},
                      {"restarts", d.restarts},
                      {"converged", d.converged},
                      {"final_change", decimal(d.final_change)},
                      {"max_inner_iterations", d.max_inner_iterations},
                      {"degenerate_states", d.degenerate_states},
                      {"purification_gap", decimal(d.purification_gap)},
                      {"recursion_gap", decimal(d.recursion_gap)},
                      {"pieces_per_cell", d.pieces_per_cell}};
  return j.dump(1) + "\n";
}

LoadedResult parse_result_text(const std::string& text, const StochasticGameSpec& spec) {
  const json doc = parse_json(text);
  const Node root(doc, "");
  LoadedResult out;
  out.spec_hash = root["spec_hash"].string();
  if (out.spec_hash != spec_hash(spec)) {
    throw InvalidInput("result was computed for a different game (spec hash mismatch)");
  }
  const std::size_t n = spec.states();
  const std::size_t m = spec.players();
  const Node cells = root["cells"];
  std::vector<std::vector<SplitPiece>> pieces(n);
  out.result.strategy.resize(n);
  for (std::size_t k = 0; k < cells.size(n); ++k) {
    for (std::size_t p = 0; p < cells[k].size(); ++p) {
      const Node piece = cells[k][p];
      SplitPiece sp;
      sp.fraction = piece["fraction"].decimal();
      sp.tag = piece["tag"].index();
      sp.value.resize(static_cast<Eigen::Index>(m));
      for (std::size_t i = 0; i < piece["value"].size(m); ++i)
        sp.value(static_cast<Eigen::Index>(i)) = piece["value"][i].decimal();
      MixedProfile f(m);
      for (std::size_t i = 0; i < piece["strategy"].size(m); ++i) {
        const Node probs = piece["strategy"][i];
        f[i].resize(static_cast<Eigen::Index>(probs.size(spec.actions[i].size())));
        for (std::size_t a = 0; a < spec.actions[i].size(); ++a)
          f[i](static_cast<Eigen::Index>(a)) = probs[a].decimal();
      }
      pieces[k].push_back(std::move(sp));
      out.result.strategy[k].push_back(std::move(f));
    }
  }
  try {
    out.result.value = SplitSelection(spec.space, std::move(pieces));
  } catch (const InvalidInput& e) {
    cells.fail(e.what());
  }
  out.result.epsilon = root["epsilon"].decimal();
  if (root.has("diagnostics")) {
    const Node d = root["diagnostics"];
    SolverDiagnostics& diag = out.result.diagnostics;
    diag.iterations = d["iterations"].index();
    diag.total_iterations = d["total_iterations"].index();
    diag.restarts = d["restarts"].index();
    diag.converged = d["converged"].boolean();
    diag.final_change = d["final_change"].decimal();
    diag.max_inner_iterations = d["max_inner_iterations"].index();
    diag.degenerate_states = d["degenerate_states"].index();
    diag.purification_gap = d["purification_gap"].decimal();
    diag.recursion_gap = d["recursion_gap"].decimal();
    for (std::size_t k = 0; k < d["pieces_per_cell"].size(); ++k)
      diag.pieces_per_cell.push_back(d["pieces_per_cell"][k].index());
  }
  return out;
}

std::string serialize_certificate(const Certificate& cert) {
  json j;
  j["epsilon"] = decimal(cert.epsilon);
  j["recursion_gap"] = decimal(cert.recursion_gap);
  json gains = json::array();
  for (const auto& cell : cert.gains) {
    json per_cell = json::array();
    for (const Eigen::VectorXd& g : cell) {
      json v = json::array();
      for (Eigen::Index i = 0; i < g.size(); ++i) v.push_back(decimal(g(i)));
      per_cell.push_back(std::move(v));
    }
    gains.push_back(std::move(per_cell));
  }
  j["gains"] = std::move(gains);
  if (cert.simulation) j["simulation"] = json::parse(serialize_simulation(*cert.simulation));
  return j.dump(1) + "\n";
}

std::string serialize_simulation(const SimulationReport& r) {
  json j;
  j["start"] = {{"cell", r.start.cell}, {"piece", r.start.piece}};
  json mean = json::array();
  json se = json::array();
  for (Eigen::Index i = 0; i < r.mean.size(); ++i) {
    mean.push_back(decimal(r.mean(i)));
    se.push_back(decimal(r.standard_error(i)));
  }
  j["mean"] = std::move(mean);
  j["standard_error"] = std::move(se);
  j["paths"] = r.paths;
  j["horizon"] = r.horizon;
  j["seed"] = r.seed;
  j["atom_occupancy"] = decimal(r.atom_occupancy);
  return j.dump(1) + "\n";
}

std::string serialize_kernel(const KernelMatrix& m) {
  std::string out = fmt::format("rows {} cols {}\ncoarse", m.values.rows(), m.values.cols());
  for (std::size_t k = 0; k < m.space.size(); ++k) out += fmt::format(" {}", m.space.coarse_of(k));
  out += "\nmass";
  for (std::size_t k = 0; k < m.space.size(); ++k) out += " " + decimal(m.space.mass(k));
  out += "\ndivisible";
  for (std::size_t k = 0; k < m.space.size(); ++k) out += m.space.divisible(k) ? " 1" : " 0";
  out += "\n";
  for (Eigen::Index r = 0; r < m.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.values.cols(); ++c) out += (c ? " " : "") + decimal(m.values(r, c));
    out += "\n";
  }
  return out;
}

KernelMatrix parse_kernel_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::pair<std::size_t, std::string>> lines;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    lines.emplace_back(line_no, line);
  }
  auto where = [&](std::size_t idx) {
    return fmt::format("line {}", idx < lines.size() ? lines[idx].first : line_no + 1);
  };
  auto expect_keyword = [&](std::size_t idx, const std::string& key) {
    if (idx >= lines.size()) throw ParseError(where(idx), fmt::format("missing '{}' line", key));
    std::istringstream ls(lines[idx].second);
    std::string word;
    ls >> word;
    if (word != key) throw ParseError(where(idx), fmt::format("expected '{}'", key));
    return std::string(std::istreambuf_iterator<char>(ls), {});
  };
  auto numbers = [&](std::size_t idx, const std::string& body, std::size_t count) {
    std::istringstream ls(body);
    std::vector<double> out;
    std::string token;
    while (ls >> token) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size() || !std::isfinite(v)) {
        throw ParseError(where(idx), fmt::format("'{}' is not a finite number", token));
      }
      out.push_back(v);
    }
    if (out.size() != count) {
      throw ParseError(where(idx), fmt::format("expected {} numbers, found {}", count, out.size()));
    }
    return out;
  };

  if (lines.empty()) throw ParseError("line 1", "empty kernel file");
  std::size_t rows = 0;
  std::size_t cols = 0;
  {
    std::istringstream ls(lines[0].second);
    std::string r_word, c_word;
    if (!(ls >> r_word >> rows >> c_word >> cols) || r_word != "rows" || c_word != "cols") {
      throw ParseError(where(0), "expected 'rows R cols C'");
    }
  }
  const auto coarse = numbers(1, expect_keyword(1, "coarse"), rows);
  const auto mass = numbers(2, expect_keyword(2, "mass"), rows);
  const auto divisible = numbers(3, expect_keyword(3, "divisible"), rows);
  std::vector<Cell> cells;
  std::vector<std::size_t> coarse_map;
  for (std::size_t k = 0; k < rows; ++k) {
    if (coarse[k] < 0 || coarse[k] != std::floor(coarse[k])) throw ParseError(where(1), "coarse index must be a nonnegative integer");
    if (divisible[k] != 0.0 && divisible[k] != 1.0) throw ParseError(where(3), "divisible flags must be 0 or 1");
    cells.push_back({mass[k], divisible[k] == 1.0});
    coarse_map.push_back(static_cast<std::size_t>(coarse[k]));
  }
  KernelMatrix m;
  try {
    m.space = GridSpace(std::move(cells), std::move(coarse_map));
  } catch (const InvalidInput& e) {
    throw ParseError(where(1), e.what());
  }
  if (lines.size() != 4 + rows) {
    throw ParseError(where(std::min(lines.size(), 4 + rows)),
                     fmt::format("expected {} matrix rows, found {}", rows, lines.size() - 4));
  }
  m.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = numbers(4 + r, lines[4 + r].second, cols);
    for (std::size_t c = 0; c < cols; ++c) {
      if (row[c] < 0.0) throw ParseError(where(4 + r), "kernel entries must be nonnegative");
      m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
    }
  }
  for (std::size_t r = 0; r < rows; ++r) m.targets.push_back(r);
  for (std::size_t c = 0; c < cols; ++c) m.columns.emplace_back(c, 0);
  return m;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput(fmt::format("cannot read {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput(fmt::format("cannot write {}", path.string()));
  out << contents;
  if (!out) throw InvalidInput(fmt::format("failed writing {}", path.string()));
}

}  // namespace smpe
