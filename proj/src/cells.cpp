#include "spectral_tail/cells.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "spectral_tail/errors.hpp"

namespace spectral_tail {

using std::numbers::pi;

double a_eval(double alpha, double p, double delta, double t) {
  const double k = pi * t / delta;
  return alpha - p * k * k;
}

double b_value(double alpha, double eps, double p, double delta) {
  if (alpha < eps)
    throw DomainError(fmt::format(
        "b_value: alpha = {} is below eps = {}; branch must be skipped", alpha,
        eps));
  return delta / pi * std::sqrt((alpha - eps) / p);
}

double beta_value(double alpha, double eps, double p, double delta) {
  if (alpha < eps)
    throw DomainError(fmt::format(
        "beta_value: alpha = {} is below eps = {}; branch must be skipped",
        alpha, eps));
  return delta / (3.0 * pi) * std::sqrt((alpha - eps) / p) *
         (2.0 * alpha + eps);
}

double clamp_phi(double bound, std::optional<double> psi_j) {
  return psi_j ? std::min(bound, *psi_j) : 0.0;
}

namespace {

// Collects modes alpha_j(x) - p (k(m) pi / delta)^2 > eps with k(m) = m - shift.
// Branches are visited in ascending j and stop at the first inactive one;
// modes stop at the first m whose value drops to eps.
CellSpectrum collect(double x, double delta, const BranchFamily& family,
                     const Stiffness& p, double eps, std::size_t shift) {
  if (!(eps > 0.0)) throw DomainError("cell spectrum: eps must be > 0");
  if (!(delta > 0.0)) throw DomainError("cell spectrum: empty cell");
  CellSpectrum out;
  const double pv = p(x);
  const auto last = family.branch_count();
  for (std::size_t j = 1; !last || j <= *last; ++j) {
    const double alpha = family.alpha(j, x);
    if (alpha <= eps) break;
    for (std::size_t m = 1;; ++m) {
      const double mu =
          a_eval(alpha, pv, delta, static_cast<double>(m - shift));
      if (!(mu > eps)) break;
      out.modes.push_back({m, j, mu});
      out.sum += mu;
    }
  }
  out.count = out.modes.size();
  return out;
}

}  // namespace

CellSpectrum cell_spectrum_dirichlet(const Cell& cell,
                                     const BranchFamily& family,
                                     const Stiffness& p, double eps) {
  return collect(cell.right, cell.width(), family, p, eps, 0);
}

CellSpectrum cell_spectrum_neumann(const Cell& cell, const BranchFamily& family,
                                   const Stiffness& p, double eps) {
  return collect(cell.left, cell.width(), family, p, eps, 1);
}

}  // namespace spectral_tail
