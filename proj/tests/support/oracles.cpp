#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

namespace oracle {

double to_double(const Q& q) {
  return static_cast<double>(q.numerator()) / static_cast<double>(q.denominator());
}

Verdict classify(const RationalPurify& p) {
  const std::size_t n = p.mass.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (!p.divisible[k]) continue;
    const auto [lo, hi] = std::minmax_element(p.candidates[k].begin(), p.candidates[k].end());
    if (p.vprime[k] < *lo || p.vprime[k] > *hi) return Verdict::OutsideHull;
  }
  const std::size_t coarse = *std::max_element(p.coarse.begin(), p.coarse.end()) + 1;
  for (std::size_t e = 0; e < coarse; ++e) {
    std::vector<std::size_t> atoms;
    for (std::size_t k = 0; k < n; ++k)
      if (p.coarse[k] == e && !p.divisible[k] && p.mass[k] > Q(0)) atoms.push_back(k);
    std::vector<std::size_t> choice(atoms.size(), 0);
    bool found = false;
    while (!found) {
      bool match = true;
      for (std::size_t j = 0; j < p.rho.size() && match; ++j) {
        Q gap = 0;
        for (std::size_t a = 0; a < atoms.size(); ++a) {
          const std::size_t k = atoms[a];
          gap += p.mass[k] * p.rho[j][k] * (p.candidates[k][choice[a]] - p.vprime[k]);
        }
        match = gap == Q(0);
      }
      if (match) {
        found = true;
        break;
      }
      std::size_t a = 0;
      while (a < atoms.size() && ++choice[a] == p.candidates[atoms[a]].size()) choice[a++] = 0;
      if (a == atoms.size()) break;
    }
    if (!found) return Verdict::NoSelection;
  }
  return Verdict::Selection;
}

smpe::PurifyInstance to_double(const RationalPurify& p) {
  smpe::PurifyInstance out;
  std::vector<smpe::Cell> cells;
  for (std::size_t k = 0; k < p.mass.size(); ++k) cells.push_back({to_double(p.mass[k]), p.divisible[k]});
  out.space = smpe::GridSpace(std::move(cells), p.coarse);
  for (const auto& rho : p.rho) {
    std::vector<double> v;
    for (const Q& q : rho) v.push_back(to_double(q));
    out.moments.push_back(smpe::StepFunction::scalar(v));
  }
  std::vector<std::vector<Eigen::VectorXd>> sets;
  for (const auto& cands : p.candidates) {
    std::vector<Eigen::VectorXd> set;
    for (const Q& q : cands) set.push_back(Eigen::VectorXd::Constant(1, to_double(q)));
    sets.push_back(std::move(set));
  }
  out.candidates = smpe::CandidateField(std::move(sets));
  std::vector<double> v;
  for (const Q& q : p.vprime) v.push_back(to_double(q));
  out.vprime = smpe::StepFunction::scalar(v);
  return out;
}

RationalPurify rational_single_atom() {
  RationalPurify p;
  p.mass = {Q(1, 2), Q(1, 2)};
  p.divisible = {false, true};
  p.coarse = {0, 1};
  p.rho = {{Q(1), Q(1)}};
  p.candidates = {{Q(0), Q(1)}, {Q(0)}};
  p.vprime = {Q(1, 2), Q(0)};
  return p;
}

RationalPurify rational_walsh(std::size_t k) {
  const std::size_t n = std::size_t{1} << k;
  RationalPurify p;
  for (std::size_t c = 0; c < n; ++c) {
    p.mass.push_back(Q(1, static_cast<long long>(n)));
    p.divisible.push_back(false);
    p.coarse.push_back(0);
    p.candidates.push_back({Q(-1), Q(1)});
    p.vprime.push_back(Q(0));
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Q> rho;
    for (std::size_t c = 0; c < n; ++c) rho.push_back(Q(__builtin_popcountll(j & c) % 2 == 0 ? 2 : 0));
    p.rho.push_back(std::move(rho));
  }
  return p;
}

RationalPurify random_rational_purify(std::mt19937_64& rng, std::size_t cells, std::size_t components) {
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  const std::size_t n = pick(2, cells);
  const std::size_t coarse_count = pick(1, std::min<std::size_t>(3, n));
  RationalPurify p;
  for (std::size_t k = 0; k < n; ++k) p.coarse.push_back(k < coarse_count ? k : pick(0, coarse_count - 1));
  // 0: divisible, 1: atomic, 2: mixed
  std::vector<std::size_t> kind(coarse_count);
  for (auto& t : kind) t = pick(0, 2);

  const std::vector<Q> values{Q(-1), Q(-1, 2), Q(0), Q(1, 2), Q(1)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t t = kind[p.coarse[k]];
    const bool divisible = t == 0 || (t == 2 && pick(0, 1) == 0);
    p.divisible.push_back(divisible);
    p.mass.push_back(!divisible && pick(0, 9) == 0 ? Q(0) : Q(static_cast<long long>(pick(1, 4)), 16));

    std::vector<Q> cands;
    const std::size_t count = (t == 2 && divisible) ? 1 : pick(1, 3);
    while (cands.size() < count) {
      const Q v = values[pick(0, values.size() - 1)];
      if (std::find(cands.begin(), cands.end(), v) == cands.end()) cands.push_back(v);
    }
    std::sort(cands.begin(), cands.end());
    Q target = cands[pick(0, cands.size() - 1)];
    if (divisible) {
      if (cands.size() > 1 && pick(0, 1) == 0) {
        const Q w(static_cast<long long>(pick(0, 4)), 4);
        target = w * cands.front() + (1 - w) * cands.back();
      }
      if (t == 0 && pick(0, 9) == 0) target = cands.back() + Q(1, 2);
    } else if (pick(0, 9) < 6) {
      target = (cands.front() + cands.back()) / 2;
    }
    p.candidates.push_back(std::move(cands));
    p.vprime.push_back(target);
  }
  const std::vector<Q> densities{Q(0), Q(1, 2), Q(1), Q(3, 2), Q(2)};
  for (std::size_t j = 0; j < components; ++j) {
    std::vector<Q> rho;
    for (std::size_t k = 0; k < n; ++k) rho.push_back(densities[pick(0, densities.size() - 1)]);
    p.rho.push_back(std::move(rho));
  }
  return p;
}

std::size_t elimination_rank(Eigen::MatrixXd m, double tol) {
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0;
  const Eigen::Index rows = m.rows();
  const Eigen::Index cols = m.cols();
  std::size_t rank = 0;
  for (Eigen::Index step = 0; step < std::min(rows, cols); ++step) {
    Eigen::Index pr = step;
    Eigen::Index pc = step;
    double best = 0.0;
    for (Eigen::Index r = step; r < rows; ++r)
      for (Eigen::Index c = step; c < cols; ++c)
        if (std::abs(m(r, c)) > best) {
          best = std::abs(m(r, c));
          pr = r;
          pc = c;
        }
    if (best <= tol * scale) break;
    m.row(step).swap(m.row(pr));
    m.col(step).swap(m.col(pc));
    for (Eigen::Index r = step + 1; r < rows; ++r) {
      const double f = m(r, step) / m(step, step);
      m.row(r).tail(cols - step) -= f * m.row(step).tail(cols - step);
    }
    ++rank;
  }
  return rank;
}

namespace {

// Solves a square system exactly; nullopt when singular.
std::optional<std::vector<Q>> solve_exact(std::vector<std::vector<Q>> a, std::vector<Q> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == Q(0)) ++p;
    if (p == n) return std::nullopt;
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == Q(0)) continue;
      const Q f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t r = 0; r < n; ++r) b[r] /= a[r][r];
  return b;
}

std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1U << i)) s.push_back(i);
    out.push_back(std::move(s));
  }
  return out;
}

// Mix over `support` (indices into `n` actions) making every action of
// `against` equally good under payoff(own, other); returns the full mix and
// the common value.
std::optional<std::pair<std::vector<Q>, Q>> indifference(
    const std::vector<std::size_t>& support, const std::vector<std::size_t>& against, std::size_t n,
    const std::function<long long(std::size_t mixed, std::size_t responder)>& payoff) {
  const std::size_t k = support.size();
  std::vector<std::vector<Q>> a(k + 1, std::vector<Q>(k + 1, Q(0)));
  std::vector<Q> b(k + 1, Q(0));
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < k; ++c) a[r][c] = payoff(support[c], against[r]);
    a[r][k] = -1;
  }
  for (std::size_t c = 0; c < k; ++c) a[k][c] = 1;
  b[k] = 1;
  auto sol = solve_exact(std::move(a), std::move(b));
  if (!sol) return std::nullopt;
  std::vector<Q> mix(n, Q(0));
  for (std::size_t c = 0; c < k; ++c) mix[support[c]] = (*sol)[c];
  return std::make_pair(mix, (*sol)[k]);
}

}  // namespace

BimatrixEquilibria bimatrix_equilibria(const std::vector<std::vector<long long>>& a,
                                       const std::vector<std::vector<long long>>& b) {
  const std::size_t rows = a.size();
  const std::size_t cols = a.front().size();
  BimatrixEquilibria out;
  for (std::size_t k = 1; k <= std::min(rows, cols); ++k) {
    for (const auto& rs : subsets(rows, k)) {
      for (const auto& cs : subsets(cols, k)) {
        // x on rs makes the column player indifferent over cs, y on cs the row player over rs.
        auto x = indifference(rs, cs, rows, [&](std::size_t i, std::size_t j) { return b[i][j]; });
        auto y = indifference(cs, rs, cols, [&](std::size_t j, std::size_t i) { return a[i][j]; });
        if (!x || !y) {
          out.complete = false;
          continue;
        }
        const auto& [xs, v2] = *x;
        const auto& [ys, v1] = *y;
        if (std::any_of(xs.begin(), xs.end(), [](const Q& q) { return q < Q(0); }) ||
            std::any_of(ys.begin(), ys.end(), [](const Q& q) { return q < Q(0); })) {
          continue;
        }
        bool best = true;
        for (std::size_t i = 0; i < rows && best; ++i) {
          Q u = 0;
          for (std::size_t j = 0; j < cols; ++j) u += a[i][j] * ys[j];
          best = u <= v1;
        }
        for (std::size_t j = 0; j < cols && best; ++j) {
          Q u = 0;
          for (std::size_t i = 0; i < rows; ++i) u += b[i][j] * xs[i];
          best = u <= v2;
        }
        if (!best) continue;
        const auto point = std::make_pair(xs, ys);
        if (std::find(out.points.begin(), out.points.end(), point) == out.points.end()) out.points.push_back(point);
      }
    }
  }
  return out;
}

}  // namespace oracle
