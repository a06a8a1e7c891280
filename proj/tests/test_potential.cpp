#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spectral_tail/errors.hpp"
#include "spectral_tail/potential.hpp"

using namespace spectral_tail;

namespace {

BranchFamily power_family(double a0 = 0.5) {
  return {PowerEnvelope{a0}, InverseSquare{}, Unclassified{}, 0.6};
}

BranchFamily ex33(double b = 25.0) {
  return {Example33Envelope{b}, InverseSquare{}, LogDecay{1.0, 2, b}, 1.0};
}

// Plain bisection on a decreasing function, independent of the library.
double bisect_sup(const std::function<double(double)>& f, double level,
                  double hi) {
  double lo = 0.0;
  for (int k = 0; k < 400 && hi - lo > 1e-13 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) >= level ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

const ConditionCheck& check(const ValidationReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return c;
  FAIL("missing check " << name);
  return r.checks.front();
}

}  // namespace

TEST_CASE("alpha evaluation") {
  const auto f = power_family();
  CHECK(f.alpha(1, 0.0) == 1.0);
  CHECK(f.alpha(2, 3.0) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK_THROWS_AS(f.alpha(0, 1.0), DomainError);
  CHECK_THROWS_AS(f.alpha(1, -1.0), DomainError);

  const auto e = ex33();
  const double expected = 1.0 / std::log(std::log(25.0));
  CHECK(e.alpha(1, 25.0) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(e.alpha(1, 25.0) == doctest::Approx(0.855408).epsilon(1e-6));
  // both pieces meet at x = b
  const double L = std::log(std::log(25.0));
  const double left_piece = 2.0 / L - 25.0 / (25.0 * L);
  CHECK(left_piece == doctest::Approx(expected).epsilon(1e-14));
  CHECK(e.alpha(1, 25.0 * (1 + 1e-12)) == doctest::Approx(expected).epsilon(1e-10));
  CHECK(e.alpha(1, 0.0) == doctest::Approx(2.0 / L).epsilon(1e-14));
  CHECK(e.alpha(3, 0.0) == doctest::Approx(2.0 / L / 9.0).epsilon(1e-14));
  // e^(e^(1/eps)) leaves the double range near eps = 0.1525
  CHECK_THROWS_AS(e.psi(1, 0.1), NumericError);
}

TEST_CASE("stiffness evaluation") {
  const auto c = Stiffness::constant(1.0);
  CHECK(c(7.0) == 1.0);
  const auto pl = Stiffness::piecewise_linear({{0, 1}, {10, 2}});
  CHECK(pl(5.0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(pl(50.0) == 2.0);
  CHECK(pl.lower_bound() == 1.0);
  CHECK(pl.upper_bound() == 2.0);
  CHECK_THROWS_AS(pl(-0.1), DomainError);
  CHECK_THROWS_AS(Stiffness::constant(0.0), ConfigError);
  CHECK_THROWS_AS(Stiffness::piecewise_linear({{0, 1}, {0, 2}}), ConfigError);
}

TEST_CASE("level set suprema") {
  const BranchFamily single(PowerEnvelope{0.5}, Geometric{0.5}, Unclassified{}, 1.0);
  const auto s = single.psi(1, 0.1);
  REQUIRE(s);
  CHECK(*s == doctest::Approx(99.0).epsilon(1e-13));
  const double bis =
      bisect_sup([&](double x) { return single.alpha(1, x); }, 0.1, 1e4);
  CHECK(*s == doctest::Approx(bis).epsilon(1e-11));
  CHECK_FALSE(single.psi(1, 1.5));
  CHECK_FALSE(single.psi(2, 0.6));

  const auto e = ex33();
  const auto p = e.psi(1, 0.5);
  REQUIRE(p);
  const double exact = std::exp(std::exp(2.0));
  CHECK(std::abs(*p / exact - 1.0) <= 1e-9);
  CHECK(*p == doctest::Approx(1618.18).epsilon(1e-5));
  const double bis33 = bisect_sup([&](double x) { return e.alpha(1, x); }, 0.5, 1e5);
  CHECK(*p == doctest::Approx(bis33).epsilon(1e-10));
  // level above alpha at b hits the linear piece
  const auto q = e.psi(1, 1.0);
  REQUIRE(q);
  CHECK(*q < 25.0);
  CHECK(e.alpha(1, *q) == doctest::Approx(1.0).epsilon(1e-12));

  // generic solver agrees with the analytic inversion
  CHECK(level_set_sup([](double x) { return std::pow(1 + x, -0.5); }, 0.1) ==
        doctest::Approx(99.0).epsilon(1e-11));
}

TEST_CASE("active branch count") {
  const auto f = power_family();
  CHECK(f.l_epsilon(0.1) == 3);
  CHECK(f.l_epsilon(2.0) == 0);
  CHECK(f.l_epsilon(0.25) == 2);
  CHECK(f.l_epsilon(1.0) == 1);
  const BranchFamily g(PowerEnvelope{0.5}, Geometric{0.5}, Unclassified{}, 1.0);
  CHECK(g.l_epsilon(0.3) == 2);
  CHECK(g.l_epsilon(0.25) == 3);
  const BranchFamily x(PowerEnvelope{0.5}, ExplicitSequence{{1.0, 0.4}},
                       Unclassified{}, 1.0);
  CHECK(x.l_epsilon(0.01) == 2);
  CHECK(x.branch_count() == 2);
  CHECK_FALSE(f.branch_count());
}

TEST_CASE("iterated logarithm") {
  CHECK(iterated_log(0, 3.7) == 3.7);
  CHECK(iterated_log(1, std::numbers::e) == doctest::Approx(1.0));
  CHECK(iterated_log(2, std::exp(std::numbers::e)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(iterated_log(2, 0.5), DomainError);
  CHECK_THROWS_AS(iterated_log(1, 0.0), DomainError);
  CHECK_THROWS_AS(iterated_log(3, std::numbers::e), DomainError);
  double prev = -INFINITY;
  for (double x = 1.5; x < 1e6; x *= 1.7) {
    const double v = iterated_log(2, x);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("construction rejects invalid catalogs") {
  CHECK_THROWS_AS(ex33(20.0), ConfigError);
  CHECK_NOTHROW(ex33(20.09));
  CHECK_THROWS_AS(BranchFamily(PowerEnvelope{0.5}, InverseSquare{},
                               Unclassified{}, 0.5),
                  ConfigError);
  CHECK_THROWS_AS(BranchFamily(PowerEnvelope{0.5}, Geometric{1.0},
                               Unclassified{}, 1.0),
                  ConfigError);
  CHECK_THROWS_AS(BranchFamily(PowerEnvelope{0.5}, InverseSquare{},
                               PowerDecay{0.7}, 1.0),
                  ConfigError);
  CHECK_THROWS_WITH_AS(BranchFamily(PowerEnvelope{0.5}, InverseSquare{},
                                    PowerDecay{0.7}, 1.0),
                       doctest::Contains("a0 outside (0, 2/3)"), ConfigError);
  CHECK_THROWS_AS(BranchFamily(LinearCutoffEnvelope{0.0}, InverseSquare{},
                               Unclassified{}, 1.0),
                  ConfigError);
}

TEST_CASE("validation report") {
  const auto p1 = Stiffness::constant(1.0);
  const BranchFamily f(PowerEnvelope{0.5}, InverseSquare{}, PowerDecay{0.5}, 0.6);
  const auto ok = validate_family(f, p1, 64);
  CHECK(ok.all_passed());
  for (auto name : {"p1", "p2", "p3", "Q1", "Q2", "Q3", "alpha2"})
    CHECK(check(ok, name).passed);

  const BranchFamily reversed(PowerEnvelope{0.5},
                              ExplicitSequence{{0.25, 0.5, 1.0}},
                              Unclassified{}, 1.0);
  const auto bad = validate_family(reversed, p1, 64);
  CHECK_FALSE(bad.all_passed());
  CHECK_FALSE(check(bad, "Q2").passed);

  const auto decreasing = Stiffness::piecewise_linear({{0, 2}, {5, 1}});
  const auto bad_p = validate_family(f, decreasing, 64);
  CHECK_FALSE(bad_p.all_passed());
  CHECK_FALSE(check(bad_p, "p3").passed);
  CHECK(check(bad_p, "p1").passed);

  const BranchFamily growing(PowerEnvelope{-0.5}, InverseSquare{},
                             Unclassified{}, 1.0);
  const auto bad_q = validate_family(growing, p1, 16);
  CHECK_FALSE(check(bad_q, "Q2").passed);
  CHECK_FALSE(check(bad_q, "Q3").passed);

  const auto e = validate_family(ex33(), p1, 64);
  CHECK(e.all_passed());
  CHECK(check(e, "alpha1").passed);

  const BranchFamily mismatch(PowerEnvelope{0.3}, InverseSquare{},
                              PowerDecay{0.5}, 0.6);
  CHECK_FALSE(check(validate_family(mismatch, p1, 16), "alpha2").passed);
  CHECK_THROWS_AS(validate_family(f, p1, 1), DomainError);
}

TEST_CASE("branch monotonicity and level-set properties") {
  const std::vector<BranchFamily> families = {
      power_family(),
      {PowerEnvelope{0.3, 2.0}, Geometric{0.7}, Unclassified{}, 1.0},
      {LinearCutoffEnvelope{10.0}, InverseSquare{}, Unclassified{}, 1.0},
      ex33(),
  };
  for (const auto& f : families) {
    for (std::size_t j = 1; j <= 6; ++j) {
      double prev = f.alpha(j, 0.0);
      for (double x = 0.01; x < 1e5; x *= 1.3) {
        const double v = f.alpha(j, x);
        CHECK(v <= prev);
        CHECK(f.alpha(j + 1, x) <= v);
        prev = v;
      }
    }
    for (std::size_t j = 1; j <= 4; ++j) {
      double prev_psi = INFINITY;
      for (double eps = 0.2; eps < 2.5; eps *= 1.25) {
        const auto s = f.psi(j, eps);
        if (!s) {
          CHECK(f.alpha(j, 0.0) < eps);
          prev_psi = 0.0;
          continue;
        }
        CHECK(*s <= prev_psi);
        prev_psi = *s;
        if (*s > 0.0)
          CHECK(std::abs(f.alpha(j, *s) - eps) <= 1e-10 * std::max(eps, 1.0));
        if (j > 1) {
          const auto above = f.psi(j - 1, eps);
          REQUIRE(above);
          CHECK(*s <= *above);
        }
      }
    }
    std::size_t prev_l = SIZE_MAX;
    for (double eps = 0.2; eps < 3.0; eps *= 1.1) {
      const auto l = f.l_epsilon(eps);
      CHECK(l <= prev_l);
      CHECK((l == 0) == (eps > f.alpha(1, 0.0)));
      prev_l = l;
    }
  }
}
