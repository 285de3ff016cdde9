#include "smpe/kernel/kernel_matrix.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>
#include <fmt/format.h>

#include "smpe/errors.hpp"

namespace smpe {

KernelMatrix kernel_matrix(const StochasticGameSpec& spec, const ColumnFilter& filter) {
  require_consistent_dimensions(spec);
  KernelMatrix out;
  out.targets = spec.space.divisible_cells();
  out.space = spec.space.restricted(out.targets);

  for (std::size_t s = 0; s < spec.states(); ++s) {
    for (std::size_t x : spec.feasible_profiles(s)) {
      if (!filter || filter(s, x)) out.columns.emplace_back(s, x);
    }
  }

  const auto rows = static_cast<Eigen::Index>(out.targets.size());
  const auto cols = static_cast<Eigen::Index>(out.columns.size());
  out.values = Eigen::MatrixXd::Zero(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::size_t k = out.targets[static_cast<std::size_t>(r)];
    const std::size_t e = spec.space.coarse_of(k);
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto [s, x] = out.columns[static_cast<std::size_t>(c)];
      double density = 0.0;
      for (std::size_t j = 0; j < spec.kernel.components; ++j)
        density += spec.kernel.at(j, e, s, x) * spec.kernel.rho[j][k];
      out.values(r, c) = density;
    }
  }
  return out;
}

namespace {

void require_shape(const KernelMatrix& m) {
  if (static_cast<std::size_t>(m.values.rows()) != m.space.size()) {
    throw InvalidInput(fmt::format("kernel matrix has {} rows for {} cells", m.values.rows(),
                                   m.space.size()));
  }
}

}  // namespace

CoarserVerdict check_coarser_detail(const KernelMatrix& m, double tol) {
  require_shape(m);
  CoarserVerdict verdict;
  for (std::size_t k = 0; k < m.space.size(); ++k) {
    if (!m.space.divisible(k) && m.space.mass(k) > 0.0) verdict.no_g_atom = false;
  }
  for (std::size_t e = 0; e < m.space.coarse_count(); ++e) {
    const auto& members = m.space.members(e);
    const auto first = static_cast<Eigen::Index>(members.front());
    for (std::size_t k : members) {
      const double dev =
          (m.values.row(static_cast<Eigen::Index>(k)) - m.values.row(first)).cwiseAbs().maxCoeff();
      if (m.values.cols() > 0) verdict.max_row_deviation = std::max(verdict.max_row_deviation, dev);
    }
  }
  verdict.coarser = verdict.no_g_atom && verdict.max_row_deviation <= tol;
  return verdict;
}

std::vector<std::size_t> block_rank_profile(const KernelMatrix& m, double threshold) {
  require_shape(m);
  if (!(threshold > 0.0)) throw InvalidInput("rank threshold must be positive");
  std::vector<std::size_t> ranks(m.space.coarse_count(), 0);
  for (std::size_t e = 0; e < m.space.coarse_count(); ++e) {
    const auto& members = m.space.members(e);
    Eigen::MatrixXd block(static_cast<Eigen::Index>(members.size()), m.values.cols());
    for (std::size_t r = 0; r < members.size(); ++r)
      block.row(static_cast<Eigen::Index>(r)) = m.values.row(static_cast<Eigen::Index>(members[r]));
    if (block.size() == 0) continue;
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(block);
    const Eigen::VectorXd& sv = svd.singularValues();
    ranks[e] = static_cast<std::size_t>((sv.array() > threshold).count());
  }
  return ranks;
}

}  // namespace smpe
