#pragma once

// Constant-coefficient model operators on one partition cell.
//
// Dirichlet minorant: -p(x_i) y'' - Q(x_i) y on [x_{i-1}, x_i], y = 0 at both
// ends; eigenvalues p(x_i)(m pi / delta)^2 - alpha_j(x_i), m >= 1.
// Neumann majorant: -p(x_{i-1}) y'' - Q(x_{i-1}) y, y' = 0 at both ends;
// eigenvalues p(x_{i-1})((m - 1) pi / delta)^2 - alpha_j(x_{i-1}), m >= 1.

#include <cstddef>
#include <optional>
#include <vector>

#include "spectral_tail/potential.hpp"

namespace spectral_tail {

struct Cell {
  double left;
  double right;
  double width() const { return right - left; }
};

struct CellMode {
  std::size_t m;
  std::size_t j;
  double mu;  // minus the model eigenvalue; always > eps
};

struct CellSpectrum {
  std::size_t count = 0;
  double sum = 0.0;
  std::vector<CellMode> modes;
};

/// alpha - p (pi t / delta)^2
double a_eval(double alpha, double p, double delta, double t);

/// (delta / pi) sqrt((alpha - eps) / p). Throws DomainError for alpha < eps.
double b_value(double alpha, double eps, double p, double delta);

/// Integral of a_eval over t in [0, b_value]:
/// (delta / (3 pi)) sqrt((alpha - eps) / p) (2 alpha + eps).
double beta_value(double alpha, double eps, double p, double delta);

/// min(bound, psi_j); an absent level set clamps to 0.
double clamp_phi(double bound, std::optional<double> psi_j);

/// Modes (m, j) with p(x_i)(m pi / delta)^2 - alpha_j(x_i) < -eps, frozen at
/// the right endpoint.
CellSpectrum cell_spectrum_dirichlet(const Cell& cell,
                                     const BranchFamily& family,
                                     const Stiffness& p, double eps);

/// Modes (m, j) with p(x_{i-1})((m-1) pi / delta)^2 - alpha_j(x_{i-1}) < -eps,
/// frozen at the left endpoint.
CellSpectrum cell_spectrum_neumann(const Cell& cell, const BranchFamily& family,
                                   const Stiffness& p, double eps);

}  // namespace spectral_tail
