#include <doctest.h>

#include <cmath>
#include <random>

#include "spectral_tail/errors.hpp"
#include "spectral_tail/partition.hpp"

using namespace spectral_tail;

TEST_CASE("uniform partition") {
  const auto p = make_partition(100.0, 0.5);
  CHECK(p.cells == 11);
  CHECK(p.delta == doctest::Approx(100.0 / 11.0).epsilon(1e-15));
  REQUIRE(p.points.size() == 12);
  CHECK(p.points.front() == 0.0);
  CHECK(p.points.back() == 100.0);
  for (std::size_t i = 1; i < p.points.size(); ++i)
    CHECK(p.points[i] - p.points[i - 1] == doctest::Approx(p.delta).epsilon(1e-12));

  const auto boundary = make_partition(4.0, 0.5);
  CHECK(boundary.cells == 3);
  CHECK(boundary.delta == doctest::Approx(4.0 / 3.0).epsilon(1e-15));

  CHECK_THROWS_AS(make_partition(2.0, 0.5), AdmissibilityError);
  CHECK_THROWS_WITH_AS(make_partition(2.0, 0.5), doctest::Contains(">= 4"),
                       AdmissibilityError);
  CHECK_THROWS_AS(make_partition(100.0, 1.0), DomainError);
  CHECK_THROWS_AS(make_partition(100.0, 0.0), DomainError);
}

TEST_CASE("partition from a branch family") {
  const BranchFamily f(PowerEnvelope{0.5}, InverseSquare{}, Unclassified{}, 0.6);
  const auto p = build_partition(f, 0.1, 0.5);
  REQUIRE(p);
  CHECK(p->psi1 == doctest::Approx(99.0).epsilon(1e-13));
  CHECK(p->cells == 10);
  CHECK_FALSE(build_partition(f, 1.5, 0.5));
  CHECK_THROWS_AS(build_partition(f, 0.9, 0.5), AdmissibilityError);
}

TEST_CASE("refined widths") {
  const auto p = make_partition(100.0, 0.5);
  const auto s = refine_delta_sequence(p, 2);
  REQUIRE(s.deltas.size() == 3);
  CHECK(s.deltas[0] == p.delta);
  CHECK(s.deltas[1] == doctest::Approx(100.0 / 110.0).epsilon(1e-14));
  CHECK(s.deltas[2] == doctest::Approx(100.0 / 1100.0).epsilon(1e-14));
  CHECK(s.deltas[0] / s.deltas[1] == doctest::Approx(10.0));
  CHECK(s.deltas[0] / s.deltas[1] < 2.0 * std::sqrt(100.0));
  REQUIRE(s.first_unit_index);
  CHECK(*s.first_unit_index == 1);
  CHECK(default_refine_depth(0.5) == 1);
  CHECK(default_refine_depth(0.25) == 3);
  CHECK(default_refine_depth(0.3) == 3);
  CHECK(default_refine_depth(0.9) == 1);
}

TEST_CASE("randomized recursion properties") {
  std::mt19937_64 rng(20241018);
  std::uniform_real_distribution<double> log_psi(std::log(10.0), std::log(1e6));
  std::uniform_real_distribution<double> exponent(0.1, 0.9);
  int admissible = 0;
  for (int draw = 0; draw < 1000; ++draw) {
    const double psi = std::exp(log_psi(rng));
    const double a = exponent(rng);
    if (std::pow(psi, a) < 2.0) {
      CHECK_THROWS_AS(make_partition(psi, a), AdmissibilityError);
      continue;
    }
    ++admissible;
    const auto p = make_partition(psi, a);
    double total = 0.0;
    for (std::size_t i = 1; i <= p.cells; ++i) total += p.points[i] - p.points[i - 1];
    CHECK(std::abs(total - psi) <= 1e-12 * psi);

    const auto i0 = static_cast<std::size_t>(std::max(0.0, std::ceil(1.0 / a - 2.0)));
    const auto s = refine_delta_sequence(p, default_refine_depth(a));
    REQUIRE(s.deltas.size() == i0 + 2);
    for (std::size_t i = 1; i < s.deltas.size(); ++i) {
      CHECK(s.deltas[i] < s.deltas[i - 1]);
      if (std::pow(psi, a) > 2.0)
        CHECK(s.deltas[i - 1] / s.deltas[i] < 2.0 * std::pow(psi, a));
    }
    CHECK(s.deltas[i0 + 1] <= 1.0);
    REQUIRE(s.first_unit_index);
    CHECK(*s.first_unit_index <= i0 + 1);
  }
  CHECK(admissible > 500);
}
