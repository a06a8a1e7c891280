#pragma once

// Reference eigenvalues below -eps for separable potentials. Each branch
// gives the scalar problem -(p y')' - alpha_j(x) y = lambda y, y(0) = 0, which
// is truncated to [0, x_max], discretized by the symmetric three-point
// stencil and solved by Sturm-sequence bisection.

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "spectral_tail/potential.hpp"

namespace spectral_tail {

enum class BoundaryCondition { dirichlet, neumann };

/// Uniform grid x_k = k h, k = 0..intervals, h * intervals = x_max. The left
/// end always carries y(0) = 0.
struct Grid {
  double x_max;
  double h;
  std::size_t intervals;
  BoundaryCondition right;

  /// Smallest grid with step <= h_target that ends exactly at x_max.
  static Grid uniform(double x_max, double h_target, BoundaryCondition right);
  Grid refined() const;  // half the step, same x_max
};

/// Symmetric tridiagonal matrix; off_diagonal[k] couples rows k and k + 1.
struct TridiagonalOperator {
  std::vector<double> diagonal;
  std::vector<double> off_diagonal;

  std::size_t size() const { return diagonal.size(); }
  /// Number of eigenvalues strictly below sigma (negative pivots of the
  /// LDL^T factorization of T - sigma I).
  std::size_t count_below(double sigma) const;
  /// Gershgorin interval containing the spectrum.
  std::pair<double, double> gershgorin() const;
};

/// Stencil (-1/h^2)[p_{k+1/2}(y_{k+1} - y_k) - p_{k-1/2}(y_k - y_{k-1})] - alpha(x_k) y_k.
/// A Neumann right end uses the mirrored ghost node; the resulting
/// half-weighted last row is symmetrized by a diagonal scaling.
TridiagonalOperator discretize(const std::function<double(double)>& alpha,
                               const Stiffness& p, const Grid& grid);

/// discretize() for branch j. Throws UnsupportedDecoupling unless the family
/// has an x-independent eigenbasis.
TridiagonalOperator discretize_branch(const BranchFamily& family,
                                      const Stiffness& p, std::size_t j,
                                      const Grid& grid);

struct EigenOptions {
  /// Absolute bisection tolerance; default 1e-12 * max(1, |threshold|).
  std::optional<double> tolerance;
  unsigned threads = 1;
};

/// k-th smallest eigenvalue (0-based) by bisection on the inertia count.
double eigenvalue_by_index(const TridiagonalOperator& T, std::size_t k,
                           double tolerance);

/// All eigenvalues strictly below threshold, ascending. The length equals
/// T.count_below(threshold).
std::vector<double> eigenvalues_below(const TridiagonalOperator& T,
                                      double threshold,
                                      const EigenOptions& options = {});

/// The `count` smallest eigenvalues, ascending.
std::vector<double> lowest_eigenvalues(const TridiagonalOperator& T,
                                       std::size_t count,
                                       const EigenOptions& options = {});

struct OracleOptions {
  std::optional<double> h;  // default min(0.01, psi_j / 2000) per branch
  double pad = 0.5;         // x_max = psi_j (1 + pad)
  bool richardson = true;
  unsigned threads = 1;
};

struct BranchSpectrum {
  std::size_t j;
  double psi;
  double x_max;
  double h;
  std::vector<double> eigenvalues;  // below -eps, ascending
  double discretization_error = 0.0;
  double truncation_error = 0.0;
  double threshold_error = 0.0;  // modes whose side of -eps is uncertain
};

struct OracleResult {
  double eps = 0.0;
  std::vector<BranchSpectrum> per_branch;
  std::size_t count = 0;
  double sum = 0.0;  // sum of |lambda| over eigenvalues below -eps
  double discretization_error = 0.0;
  double truncation_error = 0.0;
  double threshold_error = 0.0;
  double error() const {
    return discretization_error + truncation_error + threshold_error;
  }
};

/// Eigenvalues below -eps branch by branch (j = 1..l_eps). The reported
/// values are Richardson-extrapolated Dirichlet-right eigenvalues; the
/// discretization error comes from the h vs h/2 difference and the
/// truncation error from the Dirichlet/Neumann right-end spread.
OracleResult negative_tail(const BranchFamily& family, const Stiffness& p,
                           double eps, const OracleOptions& options = {});

}  // namespace spectral_tail
