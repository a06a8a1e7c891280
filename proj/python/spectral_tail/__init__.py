"""Bracketing and reference computations for negative spectral tails."""

from ._core import (
    AdmissibilityError,
    Config,
    ConfigError,
    DomainError,
    NumericError,
    UnsupportedDecoupling,
    a_eval,
    b_value,
    beta_value,
    bracket,
    error_exponents,
    oracle,
    partition,
    psi,
    refined_widths,
    run,
    weyl,
)

__all__ = [
    "AdmissibilityError",
    "Config",
    "ConfigError",
    "DomainError",
    "NumericError",
    "UnsupportedDecoupling",
    "a_eval",
    "b_value",
    "beta_value",
    "bracket",
    "error_exponents",
    "oracle",
    "partition",
    "psi",
    "refined_widths",
    "run",
    "weyl",
]
