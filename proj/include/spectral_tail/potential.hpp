#pragma once

// Coefficient p(x) and the eigenvalue branches alpha_j(x) of the potential
// Q(x) for the half-line operator -(p y')' - Q y, y(0) = 0.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace spectral_tail {

/// ln_0 x = x, ln_n x = ln(ln_{n-1} x). Throws DomainError when an
/// intermediate value is not positive before the next logarithm.
double iterated_log(unsigned n, double x);

struct Knot {
  double x;
  double value;
  bool operator==(const Knot&) const = default;
};

/// The scalar coefficient p(x) of the leading term. Either a constant or a
/// piecewise-linear interpolant through knots, held constant outside the
/// knot range.
class Stiffness {
 public:
  static Stiffness constant(double c);
  static Stiffness piecewise_linear(std::vector<Knot> knots);

  /// p(x); throws DomainError for x < 0.
  double operator()(double x) const;

  double lower_bound() const { return lower_; }
  double upper_bound() const { return upper_; }
  bool is_constant() const { return knots_.size() == 1; }
  std::span<const Knot> knots() const { return knots_; }
  /// Abscissae where p has a kink.
  std::vector<double> breakpoints() const;
  double max_slope() const;

 private:
  explicit Stiffness(std::vector<Knot> knots);

  std::vector<Knot> knots_;
  double lower_ = 0.0;
  double upper_ = 0.0;
};

// Envelope catalog: alpha_1 = g.
struct PowerEnvelope {  // g(x) = scale * (1 + x)^(-a0)
  double a0;
  double scale = 1.0;
  bool operator==(const PowerEnvelope&) const = default;
};
struct LinearCutoffEnvelope {  // g(x) = max(0, 1 - x / x0)
  double x0;
  bool operator==(const LinearCutoffEnvelope&) const = default;
};
struct Example33Envelope {  // two-piece log-log envelope, b > e^3
  double b;
  bool operator==(const Example33Envelope&) const = default;
};
using Envelope =
    std::variant<PowerEnvelope, LinearCutoffEnvelope, Example33Envelope>;

// Coefficient catalog: alpha_j = c_j g.
struct InverseSquare {  // c_j = j^-2
  bool operator==(const InverseSquare&) const = default;
};
struct Geometric {        // c_j = r^(j-1)
  double ratio;
  bool operator==(const Geometric&) const = default;
};
struct ExplicitSequence {  // c_1..c_K, zero beyond
  std::vector<double> values;
  bool operator==(const ExplicitSequence&) const = default;
};
using Coefficients = std::variant<InverseSquare, Geometric, ExplicitSequence>;

// Decay classes used by the asymptotic statements.
struct Unclassified {
  bool operator==(const Unclassified&) const = default;
};
struct LogDecay {  // alpha_1(x) >= (ln_n x)^(-xi) on [b, inf)
  double xi;
  unsigned n;
  double b;
  bool operator==(const LogDecay&) const = default;
};
struct PowerDecay {  // alpha_1(x) ~ x^(-a0), a0 in (0, 2/3)
  double a0;
  bool operator==(const PowerDecay&) const = default;
};
using DecayClass = std::variant<Unclassified, LogDecay, PowerDecay>;

/// Eigenvalue branches alpha_j(x) = c_j g(x) of a separable potential.
/// Immutable after construction.
class BranchFamily {
 public:
  /// Throws ConfigError for invalid catalog parameters or a declared
  /// summability exponent m for which sum_j alpha_j(0)^m diverges.
  BranchFamily(Envelope envelope, Coefficients coefficients,
               DecayClass decay_class, double summability_exponent,
               bool fixed_eigenbasis = true);

  double envelope(double x) const;
  double coefficient(std::size_t j) const;
  /// c_j g(x). Throws DomainError for j = 0 or x < 0.
  double alpha(std::size_t j, double x) const;

  /// sup{x >= 0 : alpha_j(x) >= eps}; nullopt when alpha_j(0) < eps.
  std::optional<double> psi(std::size_t j, double eps) const;

  /// Number of branches with alpha_j(0) >= eps.
  std::size_t l_epsilon(double eps) const;

  /// Number of nonzero branches, or nullopt for infinite catalogs.
  std::optional<std::size_t> branch_count() const;

  /// Abscissae where g has a kink.
  std::vector<double> breakpoints() const;

  const Envelope& envelope_spec() const { return envelope_; }
  const Coefficients& coefficients_spec() const { return coefficients_; }
  const DecayClass& decay_class() const { return decay_class_; }
  double summability_exponent() const { return m_; }
  bool fixed_eigenbasis() const { return fixed_eigenbasis_; }

 private:
  Envelope envelope_;
  Coefficients coefficients_;
  DecayClass decay_class_;
  double m_;
  bool fixed_eigenbasis_;
};

/// sup{x >= 0 : f(x) >= level} for a nonincreasing f with f(0) >= level.
/// Geometric expansion of the upper bracket from 1, then bisection to
/// 1e-12 * max(1, x).
double level_set_sup(const std::function<double(double)>& f, double level);

struct ConditionCheck {
  std::string name;
  bool passed;
  std::string detail;
  bool informational = false;  // reported, not part of the verdict
};

struct ValidationReport {
  std::vector<ConditionCheck> checks;
  bool all_passed() const;
};

/// Checks the standing hypotheses on p and Q on a deterministic grid of
/// `sample_count` linearly and `sample_count` logarithmically spaced points.
ValidationReport validate_family(const BranchFamily& family,
                                 const Stiffness& p,
                                 std::size_t sample_count);

}  // namespace spectral_tail
