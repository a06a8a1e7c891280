#include "spectral_tail/semiclassical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "spectral_tail/errors.hpp"
#include "spectral_tail/parallel.hpp"

namespace spectral_tail {

double weyl_density(double alpha, double eps, double p) {
  if (!(alpha > eps)) return 0.0;
  return std::sqrt((alpha - eps) / p) * (2.0 * alpha + eps) /
         (3.0 * std::numbers::pi);
}

QuadratureResult weyl_integral(const std::function<double(double)>& alpha,
                               const Stiffness& p, double eps, double lo,
                               double hi, std::span<const double> breakpoints,
                               double rel_tol) {
  auto f = [&](double x) { return weyl_density(alpha(x), eps, p(x)); };
  std::vector<double> kinks(breakpoints.begin(), breakpoints.end());
  for (double b : p.breakpoints()) kinks.push_back(b);
  auto r = integrate(f, lo, hi, kinks, rel_tol);
  if (!std::isfinite(r.value) ||
      r.error > 1e4 * rel_tol * std::abs(r.value) + 1e-300)
    throw NumericError(fmt::format(
        "weyl quadrature on [{}, {}] did not converge (value {}, error {})", lo,
        hi, r.value, r.error));
  return r;
}

WeylResult weyl_tail_sum(const BranchFamily& family, const Stiffness& p,
                         double eps, double rel_tol, unsigned threads) {
  if (!(eps > 0.0)) throw DomainError("weyl_tail_sum: eps must be > 0");
  WeylResult out;
  out.eps = eps;
  const std::size_t active = family.l_epsilon(eps);
  out.per_branch.resize(active);
  std::vector<double> errors(active, 0.0);
  const auto kinks = family.breakpoints();

  parallel_for(active, threads, [&](std::size_t k) {
    const std::size_t j = k + 1;
    const double psi = family.psi(j, eps).value_or(0.0);
    double contribution = 0.0;
    if (psi > 0.0) {
      try {
        auto r = weyl_integral([&](double x) { return family.alpha(j, x); }, p,
                               eps, 0.0, psi, kinks, rel_tol);
        contribution = r.value;
        errors[k] = r.error;
      } catch (const NumericError& e) {
        throw NumericError(fmt::format("branch {}: {}", j, e.what()));
      }
    }
    out.per_branch[k] = {j, psi, contribution};
  });

  CompensatedSum total, err;
  for (std::size_t k = 0; k < active; ++k) {
    total.add(out.per_branch[k].contribution);
    err.add(errors[k]);
  }
  out.total = total.value();
  out.error_estimate = err.value();
  return out;
}

ExponentReport error_exponents(double a0, double m) {
  if (!(a0 > 0.0 && a0 < 2.0 / 3.0))
    throw DomainError(fmt::format("a0 outside (0, 2/3) (got {})", a0));
  const double gap = 2.0 - 3.0 * a0;
  const double sup = gap * gap / (2.0 * a0 * (4.0 - 3.0 * a0));
  if (!(m > 0.0 && m < sup))
    throw AdmissibilityError(fmt::format(
        "m = {} outside the admissible range (0, {}) for a0 = {}", m, sup, a0));
  ExponentReport r;
  r.a0 = a0;
  r.m = m;
  r.admissible_m_sup = sup;
  r.a_param = (gap * gap + 6.0 * a0 * a0 * m) / (4.0 * gap);
  r.t0 = (gap * gap + 6.0 * a0 * a0 * m - 8.0 * a0 * m) / (16.0 * a0);
  return r;
}

}  // namespace spectral_tail
