#pragma once

#include <stdexcept>
#include <string>

namespace spectral_tail {

/// Argument outside the mathematical domain of an operation (j = 0, x < 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed or inconsistent configuration of a family, coefficient or run.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The requested eps violates psi_1(eps)^a >= 2, or m lies outside the
/// admissible exponent range.
class AdmissibilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Quadrature non-convergence, pivot breakdown, overflow of a level set.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The oracle only handles potentials with an x-independent eigenbasis.
class UnsupportedDecoupling : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace spectral_tail
