#include "spectral_tail/bounds.hpp"

#include <cmath>

#include <fmt/format.h>

#include "spectral_tail/errors.hpp"
#include "spectral_tail/parallel.hpp"
#include "spectral_tail/quadrature.hpp"

namespace spectral_tail {

namespace {

// beta_j(eps, x) / delta is independent of delta; keep the delta-carrying
// form so the identity with the Weyl density is checked rather than assumed.
double beta_over_delta(double alpha, double eps, double p, double delta) {
  return alpha > eps ? beta_value(alpha, eps, p, delta) / delta : 0.0;
}

std::vector<double> kinks(const BranchFamily& family, const Stiffness& p) {
  auto out = family.breakpoints();
  for (double b : p.breakpoints()) out.push_back(b);
  return out;
}

double integrate_checked(const std::function<double(double)>& f, double lo,
                         double hi, const std::vector<double>& breaks,
                         std::size_t j) {
  const auto r = integrate(f, lo, hi, breaks);
  if (!std::isfinite(r.value) || r.error > 1e-8 * std::abs(r.value) + 1e-300)
    throw NumericError(fmt::format(
        "quadrature for branch {} on [{}, {}] did not converge (error {})", j,
        lo, hi, r.error));
  return r.value;
}

}  // namespace

SpectralBracket assemble_bracket(const BranchFamily& family, const Stiffness& p,
                                 double eps, double a, unsigned threads) {
  SpectralBracket out;
  out.eps = eps;
  out.a = a;
  const auto partition = build_partition(family, eps, a);
  if (!partition) return out;
  out.cells = partition->cells;
  out.delta = partition->delta;
  out.l_eps = family.l_epsilon(eps);

  // Every Neumann cell holds at most sum_j (b_j(0) + 1) modes at the
  // smallest p.
  double per_cell_modes = 0.0;
  for (std::size_t j = 1; j <= out.l_eps; ++j) {
    const double a0 = family.alpha(j, 0.0);
    per_cell_modes +=
        (a0 > eps ? b_value(a0, eps, p.lower_bound(), out.delta) : 0.0) + 1.0;
  }
  const double estimate = per_cell_modes * static_cast<double>(out.cells);
  if (estimate > kMaxBracketModes)
    throw NumericError(fmt::format(
        "bracket at eps = {} would enumerate up to {:.3g} modes over {} cells",
        eps, estimate, out.cells));

  out.per_cell.resize(partition->cells);
  parallel_for(partition->cells, threads, [&](std::size_t k) {
    const Cell cell{partition->points[k], partition->points[k + 1]};
    auto d = cell_spectrum_dirichlet(cell, family, p, eps);
    auto n = cell_spectrum_neumann(cell, family, p, eps);
    d.modes = {};
    n.modes = {};
    out.per_cell[k] = {k + 1, cell, std::move(d), std::move(n)};
  });
  for (const auto& c : out.per_cell) {
    out.n_lower += c.dirichlet.count;
    out.n_upper += c.neumann.count;
    out.s_lower += c.dirichlet.sum;
    out.s_upper += c.neumann.sum;
  }
  return out;
}

TheoremExpressionReport theorem_expressions(const BranchFamily& family,
                                            const Stiffness& p, double eps,
                                            double a, double C1, double C2) {
  if (!(C1 >= 0.0 && C2 >= 0.0))
    throw DomainError("theorem_expressions: constants must be >= 0");
  if (!(a > 0.0 && a < 1.0))
    throw DomainError("theorem_expressions: a must lie in (0, 1)");
  TheoremExpressionReport r;
  r.eps = eps;
  r.a = a;
  r.C1 = C1;
  r.C2 = C2;
  const auto psi1 = family.psi(1, eps);
  if (!psi1 || *psi1 == 0.0) return r;

  const double psi_a = std::pow(*psi1, a);
  r.admissible = psi_a >= 2.0;
  r.delta = *psi1 / (std::floor(psi_a) + 1.0);
  const double delta = r.delta;
  const auto breaks = kinks(family, p);

  const std::size_t active = family.l_epsilon(eps);
  CompensatedSum main, alpha_pow, alpha0;
  for (std::size_t j = 1; j <= active; ++j) {
    const double psi = family.psi(j, eps).value_or(0.0);
    main.add(integrate_checked(
        [&](double x) {
          return beta_over_delta(family.alpha(j, x), eps, p(x), delta);
        },
        0.0, psi, breaks, j));
    alpha_pow.add(integrate_checked(
        [&](double x) { return std::pow(family.alpha(j, x), 1.5); }, 0.0,
        delta, breaks, j));
    alpha0.add(family.alpha(j, 0.0));
  }
  r.components = {main.value(), alpha_pow.value(), psi_a * alpha0.value()};
  const double correction =
      C1 * r.components.alpha_pow + C2 * r.components.psi_weight;
  r.lower_expr = r.components.main - correction;
  r.upper_expr = r.components.main + correction;
  r.lower_vacuous = r.lower_expr < 0.0;
  return r;
}

double dirichlet_cell_estimate(const BranchFamily& family, const Stiffness& p,
                               const Partition& partition, std::size_t i) {
  if (i < 1 || i >= partition.cells)
    throw DomainError(fmt::format(
        "dirichlet_cell_estimate: interior cell index {} outside [1, {})", i,
        partition.cells));
  const double eps = partition.eps;
  const double delta = partition.delta;
  const double xi = partition.points[i];
  const double next = partition.points[i + 1];
  const auto breaks = kinks(family, p);
  const auto last = family.branch_count();

  CompensatedSum main;
  for (std::size_t j = 1; !last || j <= *last; ++j) {
    if (!(family.alpha(j, xi) > eps)) break;
    const double upper = clamp_phi(next, family.psi(j, eps));
    main.add(integrate_checked(
        [&](double x) {
          return beta_over_delta(family.alpha(j, x), eps, p(x), delta);
        },
        xi, upper, breaks, j));
  }
  CompensatedSum alpha0;
  for (std::size_t j = 1; !last || j <= *last; ++j) {
    const double v = family.alpha(j, 0.0);
    if (!(v > eps)) break;
    alpha0.add(v);
  }
  return main.value() - 3.0 * alpha0.value();
}

double neumann_cell_estimate(const BranchFamily& family, const Stiffness& p,
                             const Partition& partition, std::size_t i) {
  if (i < 1 || i > partition.cells)
    throw DomainError(fmt::format(
        "neumann_cell_estimate: cell index {} outside [1, {}]", i,
        partition.cells));
  const double eps = partition.eps;
  const double x = partition.points[i - 1];
  const double pv = p(x);
  const auto last = family.branch_count();
  CompensatedSum total;
  for (std::size_t j = 1; !last || j <= *last; ++j) {
    const double alpha = family.alpha(j, x);
    if (!(alpha > eps)) break;
    total.add(alpha + beta_value(alpha, eps, pv, partition.delta));
  }
  return total.value();
}

}  // namespace spectral_tail
