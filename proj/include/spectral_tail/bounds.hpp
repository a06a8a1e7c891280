#pragma once

// Two-sided bracket on the count and sum of eigenvalues below -eps obtained
// by Dirichlet-Neumann bracketing on the uniform partition of [0, psi_1(eps)].
//
//   sum_i n_dirichlet(i) <= N(eps) <= sum_i n_neumann(i)
//   sum_i S_dirichlet(i) <= sum_{lambda_k > eps} lambda_k <= sum_i S_neumann(i)
//
// Every cell, including the first, is majorized by its constant-coefficient
// Neumann model so the upper side carries no unknown constants.

#include <cstddef>
#include <vector>

#include "spectral_tail/cells.hpp"
#include "spectral_tail/partition.hpp"
#include "spectral_tail/potential.hpp"

namespace spectral_tail {

/// Per-cell counts and sums; mode lists are not retained (see
/// cell_spectrum_dirichlet / cell_spectrum_neumann for those).
struct CellBracket {
  std::size_t index;  // 1-based cell index i, cell = [x_{i-1}, x_i]
  Cell cell;
  CellSpectrum dirichlet;
  CellSpectrum neumann;
};

/// Upper limit on the number of model modes a bracket may enumerate.
inline constexpr double kMaxBracketModes = 2e9;

struct SpectralBracket {
  double eps = 0.0;
  double a = 0.0;
  std::size_t cells = 0;  // M; 0 when the spectrum below -eps is empty
  double delta = 0.0;
  std::size_t l_eps = 0;
  std::size_t n_lower = 0;
  std::size_t n_upper = 0;
  double s_lower = 0.0;
  double s_upper = 0.0;
  std::vector<CellBracket> per_cell;
};

/// Throws AdmissibilityError when psi_1(eps)^a < 2 and NumericError when the
/// Neumann side would enumerate more than kMaxBracketModes modes. Cells are
/// evaluated in parallel and reduced in ascending cell order.
SpectralBracket assemble_bracket(const BranchFamily& family, const Stiffness& p,
                                 double eps, double a = 0.5,
                                 unsigned threads = 1);

struct TheoremTerms {
  double main = 0.0;        // (1/delta) sum_{j<=l_eps} int_0^psi_j beta_j dx
  double alpha_pow = 0.0;   // sum_{j<=l_eps} int_0^delta alpha_j^(3/2) dx
  double psi_weight = 0.0;  // psi_1^a sum_{j<=l_eps} alpha_j(0)
};

struct TheoremExpressionReport {
  double eps = 0.0;
  double a = 0.0;
  double delta = 0.0;
  bool admissible = false;  // psi_1^a >= 2
  double C1 = 0.0;
  double C2 = 0.0;
  TheoremTerms components;
  double lower_expr = 0.0;  // main - C1 alpha_pow - C2 psi_weight
  double upper_expr = 0.0;  // main + C1 alpha_pow + C2 psi_weight
  bool lower_vacuous = false;
};

/// Right-hand sides of the asymptotic lower and upper sum bounds with the
/// unspecified constants supplied as C1 and C2. delta follows the partition
/// formula even when psi_1^a < 2; `admissible` records whether it holds.
TheoremExpressionReport theorem_expressions(const BranchFamily& family,
                                            const Stiffness& p, double eps,
                                            double a = 0.5, double C1 = 3.0,
                                            double C2 = 3.0);

/// (1/delta) sum_{j : alpha_j(x_i) > eps} int_{x_i}^{min(x_{i+1}, psi_j)} beta_j dx
/// - 3 sum_{j : alpha_j(0) > eps} alpha_j(0), the per-cell lower estimate
/// for interior cells 1 <= i < M.
double dirichlet_cell_estimate(const BranchFamily& family, const Stiffness& p,
                               const Partition& partition, std::size_t i);

/// sum_{j : alpha_j(x_{i-1}) > eps} (alpha_j(x_{i-1}) + beta_j(eps, x_{i-1})),
/// the per-cell Neumann upper estimate, 1 <= i <= M.
double neumann_cell_estimate(const BranchFamily& family, const Stiffness& p,
                             const Partition& partition, std::size_t i);

}  // namespace spectral_tail
