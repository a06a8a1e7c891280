#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "spectral_tail/potential.hpp"

namespace spectral_tail {

/// Uniform grid 0 = x_0 < ... < x_M = psi_1(eps) with
/// M = floor(psi_1^a) + 1 cells of width delta = psi_1 / M.
struct Partition {
  double eps;
  double a;
  double psi1;
  std::size_t cells;
  double delta;
  std::vector<double> points;
};

/// Largest cell count a partition may have before it is rejected as
/// numerically infeasible.
inline constexpr std::size_t kMaxPartitionCells = 50'000'000;

/// Partition of [0, psi1]. Throws AdmissibilityError when psi1^a < 2 and
/// DomainError when a is outside (0, 1).
Partition make_partition(double psi1, double a, double eps = 0.0);

/// Partition of [0, psi_1(eps)]; nullopt when psi_1(eps) is absent (no
/// spectrum below -eps).
std::optional<Partition> build_partition(const BranchFamily& family,
                                         double eps, double a);

/// Default refinement depth: ceil(1/a - 2) + 1, at least 1.
std::size_t default_refine_depth(double a);

/// Cell widths delta_i = delta_{i-1} / (floor(delta_{i-1} psi1^((i+1)a-1)) + 1),
/// delta_0 = delta.
struct DeltaSequence {
  double eps;
  double a;
  double psi1;
  std::vector<double> deltas;
  /// First i with delta_i <= 1, if reached within the requested depth.
  std::optional<std::size_t> first_unit_index;
};

/// Generates delta_0..delta_K and records the first index with delta_i <= 1.
DeltaSequence refine_delta_sequence(const Partition& partition, std::size_t K);

}  // namespace spectral_tail
