#include "spectral_tail/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "spectral_tail/errors.hpp"
#include "spectral_tail/parallel.hpp"

namespace spectral_tail {

Grid Grid::uniform(double x_max, double h_target, BoundaryCondition right) {
  if (!(x_max > 0.0) || !std::isfinite(x_max))
    throw DomainError(fmt::format("grid: x_max must be positive (got {})", x_max));
  if (!(h_target > 0.0))
    throw DomainError(fmt::format("grid: h must be positive (got {})", h_target));
  const double n = std::max(2.0, std::ceil(x_max / h_target));
  if (n > 1e9) throw NumericError(fmt::format("grid: {} intervals requested", n));
  const auto intervals = static_cast<std::size_t>(n);
  return {x_max, x_max / static_cast<double>(intervals), intervals, right};
}

Grid Grid::refined() const {
  return {x_max, x_max / static_cast<double>(2 * intervals), 2 * intervals,
          right};
}

namespace {

// Sturm count for up to kLanes shifts in one sweep; independent recurrences
// interleave so the divisions pipeline.
constexpr std::size_t kLanes = 4;

bool sturm_counts(const TridiagonalOperator& T,
                  const std::array<double, kLanes>& sigma,
                  std::array<std::size_t, kLanes>& count) {
  const auto& a = T.diagonal;
  const auto& b = T.off_diagonal;
  std::array<double, kLanes> d;
  for (std::size_t l = 0; l < kLanes; ++l) {
    d[l] = a[0] - sigma[l];
    count[l] = d[l] < 0.0;
  }
  bool ok = true;
  for (std::size_t k = 1; k < a.size(); ++k) {
    const double bb = b[k - 1] * b[k - 1];
    for (std::size_t l = 0; l < kLanes; ++l) {
      ok &= d[l] != 0.0;
      d[l] = (a[k] - sigma[l]) - bb / d[l];
      count[l] += d[l] < 0.0;
    }
  }
  return ok;
}

// Counts with the breakdown policy: an exactly zero pivot shifts sigma down
// by a few ulps of the matrix scale and retries.
std::array<std::size_t, kLanes> robust_counts(const TridiagonalOperator& T,
                                              std::array<double, kLanes> sigma,
                                              double scale) {
  std::array<std::size_t, kLanes> count{};
  for (int attempt = 0; attempt < 4; ++attempt) {
    if (sturm_counts(T, sigma, count)) return count;
    for (auto& s : sigma)
      s -= std::ldexp(scale * std::numeric_limits<double>::epsilon(),
                      4 * attempt);
  }
  throw NumericError("Sturm count: pivot breakdown persists after shifting");
}

}  // namespace

std::size_t TridiagonalOperator::count_below(double sigma) const {
  if (diagonal.empty()) return 0;
  const auto [glo, ghi] = gershgorin();
  const double scale = std::max({1.0, std::abs(glo), std::abs(ghi)});
  return robust_counts(*this, {sigma, sigma, sigma, sigma}, scale)[0];
}

std::pair<double, double> TridiagonalOperator::gershgorin() const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t k = 0; k < diagonal.size(); ++k) {
    double r = 0.0;
    if (k > 0) r += std::abs(off_diagonal[k - 1]);
    if (k + 1 < diagonal.size()) r += std::abs(off_diagonal[k]);
    lo = std::min(lo, diagonal[k] - r);
    hi = std::max(hi, diagonal[k] + r);
  }
  return {lo, hi};
}

TridiagonalOperator discretize(const std::function<double(double)>& alpha,
                               const Stiffness& p, const Grid& grid) {
  const std::size_t n = grid.intervals;
  const double h = grid.h;
  const double inv_h2 = 1.0 / (h * h);
  auto node = [&](std::size_t k) {
    return k == n ? grid.x_max : static_cast<double>(k) * h;
  };
  auto p_mid = [&](std::size_t k) {  // p at x_k + h/2
    return p((static_cast<double>(k) + 0.5) * h);
  };

  const bool neumann = grid.right == BoundaryCondition::neumann;
  const std::size_t size = neumann ? n : n - 1;
  TridiagonalOperator T;
  T.diagonal.resize(size);
  T.off_diagonal.resize(size > 0 ? size - 1 : 0);
  // Row r is node k = r + 1.
  for (std::size_t r = 0; r < size; ++r) {
    const std::size_t k = r + 1;
    const double left = p_mid(k - 1);
    if (neumann && k == n) {
      T.diagonal[r] = 2.0 * left * inv_h2 - alpha(node(k));
    } else {
      T.diagonal[r] = (left + p_mid(k)) * inv_h2 - alpha(node(k));
    }
    if (r + 1 < size) {
      double coupling = -p_mid(k) * inv_h2;
      if (neumann && k + 1 == n) coupling *= std::sqrt(2.0);
      T.off_diagonal[r] = coupling;
    }
  }
  return T;
}

TridiagonalOperator discretize_branch(const BranchFamily& family,
                                      const Stiffness& p, std::size_t j,
                                      const Grid& grid) {
  if (!family.fixed_eigenbasis())
    throw UnsupportedDecoupling(
        "oracle: potential eigenbasis depends on x; branches do not decouple");
  if (j == 0) throw DomainError("discretize_branch: j must be >= 1");
  return discretize([&](double x) { return family.alpha(j, x); }, p, grid);
}

namespace {

// Bisection for the eigenvalues with 0-based indices first..first+count-1,
// all bracketed by [lo, hi], in lockstep groups of kLanes.
std::vector<double> bisect_indices(const TridiagonalOperator& T,
                                   std::size_t first, std::size_t count,
                                   double lo, double hi, double tolerance,
                                   unsigned threads) {
  std::vector<double> out(count);
  const auto [glo, ghi] = T.gershgorin();
  const double scale = std::max({1.0, std::abs(glo), std::abs(ghi)});
  const std::size_t groups = (count + kLanes - 1) / kLanes;
  parallel_for(groups, threads, [&](std::size_t g) {
    std::array<double, kLanes> l, u;
    std::array<std::size_t, kLanes> idx;
    for (std::size_t q = 0; q < kLanes; ++q) {
      idx[q] = first + std::min(g * kLanes + q, count - 1);
      l[q] = lo;
      u[q] = hi;
    }
    for (;;) {
      std::array<double, kLanes> mid;
      bool active = false;
      for (std::size_t q = 0; q < kLanes; ++q) {
        mid[q] = 0.5 * (l[q] + u[q]);
        if (u[q] - l[q] > tolerance && mid[q] != l[q] && mid[q] != u[q])
          active = true;
      }
      if (!active) break;
      const auto c = robust_counts(T, mid, scale);
      for (std::size_t q = 0; q < kLanes; ++q) {
        if (!(u[q] - l[q] > tolerance) || mid[q] == l[q] || mid[q] == u[q])
          continue;
        (c[q] > idx[q] ? u[q] : l[q]) = mid[q];
      }
    }
    for (std::size_t q = 0; q < kLanes && g * kLanes + q < count; ++q)
      out[g * kLanes + q] = 0.5 * (l[q] + u[q]);
  });
  return out;
}

double default_tolerance(double scale) {
  return 1e-12 * std::max(1.0, std::abs(scale));
}

}  // namespace

double eigenvalue_by_index(const TridiagonalOperator& T, std::size_t k,
                           double tolerance) {
  if (k >= T.size())
    throw DomainError(fmt::format("eigenvalue index {} >= size {}", k, T.size()));
  const auto [lo, hi] = T.gershgorin();
  return bisect_indices(T, k, 1, lo, hi, tolerance, 1).front();
}

std::vector<double> eigenvalues_below(const TridiagonalOperator& T,
                                      double threshold,
                                      const EigenOptions& options) {
  if (!std::isfinite(threshold))
    throw DomainError("eigenvalues_below: threshold must be finite");
  const std::size_t count = T.count_below(threshold);
  if (count == 0) return {};
  const double tol = options.tolerance.value_or(default_tolerance(threshold));
  const double lo = T.gershgorin().first;
  auto values = bisect_indices(T, 0, count, lo, threshold, tol, options.threads);
  for (auto& v : values) v = std::min(v, std::nextafter(threshold, -INFINITY));
  return values;
}

std::vector<double> lowest_eigenvalues(const TridiagonalOperator& T,
                                       std::size_t count,
                                       const EigenOptions& options) {
  if (count == 0) return {};
  if (count > T.size())
    throw DomainError(fmt::format("requested {} eigenvalues of a {}x{} matrix",
                                  count, T.size(), T.size()));
  const auto [lo, ghi] = T.gershgorin();
  // Grow the upper bracket from the bottom of the spectrum instead of using
  // the Gershgorin bound, which scales like 1/h^2.
  double width = 1.0;
  double hi = lo + width;
  while (hi < ghi && T.count_below(hi) < count) {
    width *= 2.0;
    hi = lo + width;
  }
  hi = std::min(hi, ghi);
  const double tol = options.tolerance.value_or(default_tolerance(hi));
  return bisect_indices(T, 0, count, lo, hi, tol, options.threads);
}

// ---------------------------------------------------------------------------

namespace {

struct RunPair {
  std::vector<double> values;  // extrapolated (or plain) eigenvalues
  std::vector<double> disc;    // per-eigenvalue discretization error
};

RunPair solve_bc(const BranchFamily& family, const Stiffness& p, std::size_t j,
                 const Grid& grid, std::size_t candidates, bool richardson,
                 unsigned threads) {
  const EigenOptions eo{std::nullopt, threads};
  const auto coarse =
      lowest_eigenvalues(discretize_branch(family, p, j, grid), candidates, eo);
  RunPair r{coarse, std::vector<double>(candidates, 0.0)};
  if (!richardson) return r;
  const auto fine = lowest_eigenvalues(
      discretize_branch(family, p, j, grid.refined()), candidates, eo);
  for (std::size_t k = 0; k < candidates; ++k) {
    r.values[k] = (4.0 * fine[k] - coarse[k]) / 3.0;
    r.disc[k] = std::abs(fine[k] - coarse[k]) / 3.0;
  }
  return r;
}

}  // namespace

OracleResult negative_tail(const BranchFamily& family, const Stiffness& p,
                           double eps, const OracleOptions& options) {
  if (!(eps > 0.0)) throw DomainError("negative_tail: eps must be > 0");
  if (!family.fixed_eigenbasis())
    throw UnsupportedDecoupling(
        "oracle: potential eigenbasis depends on x; branches do not decouple");
  if (!(options.pad > 0.0)) throw DomainError("negative_tail: pad must be > 0");
  OracleResult out;
  out.eps = eps;
  const double threshold = -eps;
  const std::size_t active = family.l_epsilon(eps);
  CompensatedSum total, disc_total, trunc_total, edge_total;

  for (std::size_t j = 1; j <= active; ++j) {
    const double psi = family.psi(j, eps).value_or(0.0);
    BranchSpectrum bs{j, psi, psi * (1.0 + options.pad), 0.0, {}, 0.0, 0.0, 0.0};
    if (!(psi > 0.0)) {
      out.per_branch.push_back(bs);
      continue;
    }
    const double h_target = options.h.value_or(std::min(0.01, psi / 2000.0));
    const auto grid_d = Grid::uniform(bs.x_max, h_target, BoundaryCondition::dirichlet);
    auto grid_n = grid_d;
    grid_n.right = BoundaryCondition::neumann;
    bs.h = grid_d.h;

    // Candidate count: every run's count below -eps, plus one spare.
    std::size_t candidates = 0;
    for (const auto& g : {grid_d, grid_n}) {
      candidates = std::max(
          candidates, discretize_branch(family, p, j, g).count_below(threshold));
      if (options.richardson)
        candidates = std::max(candidates,
                              discretize_branch(family, p, j, g.refined())
                                  .count_below(threshold));
    }
    candidates += 1;

    RunPair dir, neu;
    for (;;) {
      candidates = std::min(candidates, grid_d.intervals - 1);
      dir = solve_bc(family, p, j, grid_d, candidates, options.richardson,
                     options.threads);
      neu = solve_bc(family, p, j, grid_n, candidates, options.richardson,
                     options.threads);
      const bool spare = dir.values.back() >= threshold &&
                         neu.values.back() >= threshold;
      if (spare || candidates == grid_d.intervals - 1) break;
      candidates += 2;
    }

    CompensatedSum disc, trunc, edge;
    for (std::size_t k = 0; k < candidates; ++k) {
      const double d = dir.values[k];
      const double spread = std::abs(d - neu.values[k]);
      const double disc_k = dir.disc[k];
      if (d < threshold) {
        bs.eigenvalues.push_back(d);
        disc.add(disc_k);
        trunc.add(spread);
        if (d + disc_k + spread >= threshold) edge.add(std::abs(d));
      } else if (neu.values[k] < threshold) {
        trunc.add(std::abs(neu.values[k]));
      } else if (d - disc_k < threshold) {
        edge.add(std::abs(d));
      }
    }
    bs.discretization_error = disc.value();
    bs.truncation_error = trunc.value();
    bs.threshold_error = edge.value();

    for (double v : bs.eigenvalues) total.add(-v);
    out.count += bs.eigenvalues.size();
    disc_total.add(bs.discretization_error);
    trunc_total.add(bs.truncation_error);
    edge_total.add(bs.threshold_error);
    out.per_branch.push_back(std::move(bs));
  }
  out.sum = total.value();
  out.discretization_error = disc_total.value();
  out.truncation_error = trunc_total.value();
  out.threshold_error = edge_total.value();
  return out;
}

}  // namespace spectral_tail
