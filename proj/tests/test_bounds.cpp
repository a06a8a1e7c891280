#include <doctest.h>

#include <cmath>
#include <numbers>

#include "reference.hpp"
#include "spectral_tail/bounds.hpp"
#include "spectral_tail/errors.hpp"
#include "spectral_tail/oracle.hpp"
#include "spectral_tail/semiclassical.hpp"

using namespace spectral_tail;

namespace {

BranchFamily power_family() {
  return {PowerEnvelope{0.5}, InverseSquare{}, PowerDecay{0.5}, 0.6};
}

reference::Modes brute_force(const BranchFamily& f, const Stiffness& p,
                             double eps, double a, std::size_t shift) {
  const auto part = build_partition(f, eps, a);
  reference::Modes total;
  for (std::size_t i = 1; i <= part->cells; ++i) {
    const double x = shift ? part->points[i - 1] : part->points[i];
    std::vector<double> alpha;
    for (std::size_t j = 1; j <= 50; ++j) alpha.push_back(f.alpha(j, x));
    const auto m = reference::enumerate_modes(alpha, p(x), part->delta, eps, shift);
    total.count += m.count;
    total.sum += m.sum;
  }
  return total;
}

}  // namespace

TEST_CASE("empty spectrum gives a zero bracket") {
  const auto b = assemble_bracket(power_family(), Stiffness::constant(1.0), 1.5);
  CHECK(b.cells == 0);
  CHECK(b.n_lower == 0);
  CHECK(b.n_upper == 0);
  CHECK(b.s_lower == 0.0);
  CHECK(b.s_upper == 0.0);
  CHECK(b.per_cell.empty());
  CHECK_THROWS_AS(assemble_bracket(power_family(), Stiffness::constant(1.0), 0.9),
                  AdmissibilityError);
  // psi_1(0.29) ~ 5e13: rejected before enumeration
  const BranchFamily ex33(Example33Envelope{25.0}, InverseSquare{},
                          LogDecay{1.0, 2, 25.0}, 1.0);
  CHECK_THROWS_AS(assemble_bracket(ex33, Stiffness::constant(1.0), 0.29), NumericError);
}

TEST_CASE("power family bracket at eps = 0.2") {
  const auto f = power_family();
  const auto p = Stiffness::constant(1.0);
  const auto b = assemble_bracket(f, p, 0.2);
  CHECK(b.cells == 5);
  CHECK(b.delta == doctest::Approx(4.8).epsilon(1e-14));
  CHECK(b.l_eps == 2);
  CHECK(b.n_lower == 0);
  CHECK(b.n_upper == 7);
  CHECK(b.s_lower == 0.0);
  CHECK(b.s_upper == doctest::Approx(3.0213273865744217).epsilon(1e-13));

  const auto lower = brute_force(f, p, 0.2, 0.5, 0);
  const auto upper = brute_force(f, p, 0.2, 0.5, 1);
  CHECK(b.n_lower == lower.count);
  CHECK(b.n_upper == upper.count);
  CHECK(b.s_upper == doctest::Approx(upper.sum).epsilon(1e-13));

  const auto r = negative_tail(f, p, 0.2);
  CHECK(b.n_lower <= r.count);
  CHECK(r.count <= b.n_upper);
  CHECK(b.s_lower - r.error() <= r.sum);
  CHECK(r.sum <= b.s_upper + r.error());
}

TEST_CASE("linear cutoff bracket by hand") {
  // g = 1 - x/8, eps = 1/2: psi = 4, M = 3, delta = 4/3, (pi/delta)^2 > 5.5
  const BranchFamily f(LinearCutoffEnvelope{8.0}, ExplicitSequence{{1.0}},
                       Unclassified{}, 1.0);
  const auto b = assemble_bracket(f, Stiffness::constant(1.0), 0.5);
  CHECK(b.cells == 3);
  CHECK(b.delta == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(b.n_lower == 0);
  CHECK(b.s_lower == 0.0);
  CHECK(b.n_upper == 3);
  CHECK(b.s_upper == doctest::Approx(1.0 + 5.0 / 6.0 + 2.0 / 3.0).epsilon(1e-14));
  REQUIRE(b.per_cell.size() == 3);
  CHECK(b.per_cell[0].neumann.sum == 1.0);
  CHECK(b.per_cell[2].neumann.sum == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("bracket consistency and refinement") {
  struct Case {
    BranchFamily f;
    Stiffness p;
    double eps_min;
  };
  const std::vector<Case> cases = {
      {power_family(), Stiffness::constant(1.0), 0.02},
      {power_family(), Stiffness::piecewise_linear({{0, 0.5}, {20, 1.5}}), 0.02},
      {{PowerEnvelope{0.4, 3.0}, Geometric{0.5}, Unclassified{}, 1.0},
       Stiffness::constant(2.0), 0.05},
      {{Example33Envelope{25.0}, InverseSquare{}, LogDecay{1.0, 2, 25.0}, 1.0},
       Stiffness::constant(1.0), 0.4},
  };
  for (const auto& [f, p, eps_min] : cases) {
    std::size_t prev_upper = 0;
    for (double eps = 0.9; eps > eps_min; eps *= 0.85) {
      SpectralBracket b;
      try {
        b = assemble_bracket(f, p, eps);
      } catch (const AdmissibilityError&) {
        continue;
      }
      CHECK(b.n_lower <= b.n_upper);
      CHECK(b.s_lower <= b.s_upper);
      CHECK(b.n_upper >= prev_upper);
      prev_upper = b.n_upper;
      std::size_t nl = 0, nu = 0;
      for (const auto& c : b.per_cell) {
        CHECK(c.neumann.count >= c.dirichlet.count);
        CHECK(c.neumann.sum >= c.dirichlet.sum);
        nl += c.dirichlet.count;
        nu += c.neumann.count;
      }
      CHECK(nl == b.n_lower);
      CHECK(nu == b.n_upper);
    }
  }
  const auto a = assemble_bracket(power_family(), Stiffness::constant(1.0), 0.03, 0.5, 1);
  const auto c = assemble_bracket(power_family(), Stiffness::constant(1.0), 0.03, 0.5, 4);
  CHECK(a.s_lower == c.s_lower);
  CHECK(a.s_upper == c.s_upper);
  CHECK(a.n_upper == c.n_upper);
}

TEST_CASE("theorem expressions") {
  const auto f = power_family();
  const auto p = Stiffness::constant(1.0);
  const auto zero = theorem_expressions(f, p, 0.1, 0.5, 0.0, 0.0);
  CHECK(zero.lower_expr == zero.components.main);
  CHECK(zero.upper_expr == zero.components.main);
  CHECK(zero.admissible);
  const auto w = weyl_tail_sum(f, p, 0.1);
  CHECK(std::abs(zero.components.main - w.total) <= 1e-10 * w.total);

  const auto t = theorem_expressions(f, p, 0.1);
  CHECK(t.C1 == 3.0);
  CHECK(t.C2 == 3.0);
  CHECK(t.components.psi_weight ==
        doctest::Approx(std::sqrt(99.0) * (1.0 + 0.25 + 1.0 / 9.0)).epsilon(1e-13));
  const double alpha_pow = reference::simpson(
      [&](double x) {
        double s = 0.0;
        for (std::size_t j = 1; j <= 3; ++j) s += std::pow(f.alpha(j, x), 1.5);
        return s;
      },
      0.0, t.delta);
  CHECK(t.components.alpha_pow == doctest::Approx(alpha_pow).epsilon(1e-11));
  CHECK(t.upper_expr - t.components.main ==
        doctest::Approx(t.components.main - t.lower_expr));

  const BranchFamily line(LinearCutoffEnvelope{1.0}, ExplicitSequence{{1.0}},
                          Unclassified{}, 1.0);
  const auto l = theorem_expressions(line, p, 0.5, 0.5, 0.0, 0.0);
  CHECK_FALSE(l.admissible);
  CHECK(l.components.main == doctest::Approx(0.0525190).epsilon(1e-6));

  const auto huge = theorem_expressions(f, p, 0.1, 0.5, 0.0, 1e6);
  CHECK(huge.lower_vacuous);
  CHECK(huge.lower_expr < 0.0);
  CHECK_THROWS_AS(theorem_expressions(f, p, 0.1, 0.5, -1.0, 0.0), DomainError);
}

TEST_CASE("per-cell estimates") {
  const auto f = power_family();
  const auto p = Stiffness::constant(1.0);
  for (double eps : {0.2, 0.1}) {
    const auto part = *build_partition(f, eps, 0.5);
    const auto b = assemble_bracket(f, p, eps);
    for (std::size_t i = 1; i <= part.cells; ++i) {
      const auto& c = b.per_cell[i - 1];
      CHECK(c.neumann.sum <= neumann_cell_estimate(f, p, part, i) + 1e-8);
      if (i < part.cells)
        CHECK(c.dirichlet.sum > dirichlet_cell_estimate(f, p, part, i) - 1e-8);
    }
    CHECK_THROWS_AS(dirichlet_cell_estimate(f, p, part, part.cells), DomainError);
    CHECK_THROWS_AS(neumann_cell_estimate(f, p, part, 0), DomainError);
  }
}
