#pragma once

#include <functional>
#include <span>

namespace spectral_tail {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

/// Tanh-sinh quadrature of f over [lo, hi], split at the given interior
/// breakpoints. Tolerates integrable endpoint singularities such as the
/// square-root edge of a Weyl integrand. `error` is the summed error
/// estimate of the pieces.
QuadratureResult integrate(const std::function<double(double)>& f, double lo,
                           double hi, std::span<const double> breakpoints = {},
                           double rel_tol = 1e-12);

}  // namespace spectral_tail
