#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "spectral_tail/potential.hpp"
#include "spectral_tail/quadrature.hpp"

namespace spectral_tail {

struct WeylBranch {
  std::size_t j;
  double psi;
  double contribution;
};

/// Semiclassical main term
///   (1 / 3pi) sum_j int_{alpha_j >= eps} sqrt((alpha_j - eps) / p) (2 alpha_j + eps) dx
/// with its per-branch breakdown.
struct WeylResult {
  double eps = 0.0;
  double total = 0.0;
  std::vector<WeylBranch> per_branch;
  double error_estimate = 0.0;
};

/// Pointwise Weyl integrand (1 / 3pi) sqrt((alpha - eps) / p) (2 alpha + eps);
/// zero where alpha <= eps.
double weyl_density(double alpha, double eps, double p);

/// Integral of the Weyl density of a single branch over [lo, hi].
/// Throws NumericError if the quadrature misses `rel_tol` by more than a
/// factor of 1e4.
QuadratureResult weyl_integral(const std::function<double(double)>& alpha,
                               const Stiffness& p, double eps, double lo,
                               double hi, std::span<const double> breakpoints,
                               double rel_tol = 1e-12);

/// Branches j = 1..l_eps integrated over [0, psi_j(eps)], summed in
/// ascending j with compensated summation.
WeylResult weyl_tail_sum(const BranchFamily& family, const Stiffness& p,
                         double eps, double rel_tol = 1e-12,
                         unsigned threads = 1);

struct ExponentReport {
  double a0;
  double m;
  double admissible_m_sup;  // (2 - 3a0)^2 / (2 a0 (4 - 3a0))
  double a_param;           // ((2 - 3a0)^2 + 6 a0^2 m) / (4 (2 - 3a0))
  double t0;                // ((2 - 3a0)^2 + 6 a0^2 m - 8 a0 m) / (16 a0)
};

/// Partition exponent and convergence rate for power-type decay of order
/// a0. Throws DomainError for a0 outside (0, 2/3) and AdmissibilityError
/// for m outside (0, admissible_m_sup).
ExponentReport error_exponents(double a0, double m);

}  // namespace spectral_tail
