#include "spectral_tail/partition.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "spectral_tail/errors.hpp"

namespace spectral_tail {

Partition make_partition(double psi1, double a, double eps) {
  if (!(a > 0.0 && a < 1.0))
    throw DomainError(fmt::format("partition exponent a must lie in (0, 1) (got {})", a));
  if (!(psi1 > 0.0) || !std::isfinite(psi1))
    throw DomainError(fmt::format("partition: psi_1 must be positive (got {})", psi1));
  const double psi_a = std::pow(psi1, a);
  if (!(psi_a >= 2.0))
    throw AdmissibilityError(fmt::format(
        "eps = {} is too large: psi_1(eps)^a = {} < 2 (psi_1 = {}, a = {}); "
        "admissible eps need psi_1(eps) >= {}",
        eps, psi_a, psi1, a, std::pow(2.0, 1.0 / a)));
  const double whole = std::floor(psi_a);
  if (whole + 1.0 > static_cast<double>(kMaxPartitionCells))
    throw NumericError(fmt::format(
        "partition of [0, {}] would need {} cells", psi1, whole + 1.0));

  Partition part;
  part.eps = eps;
  part.a = a;
  part.psi1 = psi1;
  part.cells = static_cast<std::size_t>(whole) + 1;
  part.delta = psi1 / static_cast<double>(part.cells);
  part.points.resize(part.cells + 1);
  for (std::size_t i = 0; i < part.cells; ++i)
    part.points[i] = static_cast<double>(i) * part.delta;
  part.points.back() = psi1;
  return part;
}

std::optional<Partition> build_partition(const BranchFamily& family,
                                         double eps, double a) {
  const auto psi1 = family.psi(1, eps);
  if (!psi1) return std::nullopt;
  if (*psi1 == 0.0)
    throw AdmissibilityError(fmt::format(
        "eps = {} is too large: psi_1(eps) = 0", eps));
  return make_partition(*psi1, a, eps);
}

std::size_t default_refine_depth(double a) {
  const double i0 = std::ceil(1.0 / a - 2.0);
  return static_cast<std::size_t>(std::max(0.0, i0)) + 1;
}

DeltaSequence refine_delta_sequence(const Partition& partition,
                                    std::size_t K) {
  if (K < 1) throw DomainError("refine_delta_sequence: K must be >= 1");
  DeltaSequence seq{partition.eps, partition.a, partition.psi1, {partition.delta},
                    std::nullopt};
  if (partition.delta <= 1.0) seq.first_unit_index = 0;
  for (std::size_t i = 1; i <= K; ++i) {
    const double prev = seq.deltas.back();
    const double exponent = static_cast<double>(i + 1) * partition.a - 1.0;
    const double whole = std::floor(prev * std::pow(partition.psi1, exponent));
    seq.deltas.push_back(prev / (whole + 1.0));
    if (!seq.first_unit_index && seq.deltas.back() <= 1.0)
      seq.first_unit_index = i;
  }
  return seq;
}

}  // namespace spectral_tail
