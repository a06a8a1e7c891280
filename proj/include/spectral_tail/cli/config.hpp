#pragma once

// YAML run configuration. Layout:
//
//   potential:
//     envelope:     {kind: power, a0: 0.5, scale: 1}
//                 | {kind: linear-cutoff, x0: 1}
//                 | {kind: example33, b: 25}
//     coefficients: {kind: inverse-square} | {kind: geometric, ratio: 0.5}
//                 | {kind: explicit, values: [1, 0.5]}
//     p:            {kind: constant, c: 1}
//                 | {kind: piecewise-linear, knots: [[0, 1], [10, 2]]}
//     decay_class:  {kind: none} | {kind: power, a0: 0.5}
//                 | {kind: log, xi: 1, n: 2, b: 25}
//     m: 0.6
//     fixed_eigenbasis: true        # optional
//   run:                            # optional block
//     eps: 0.2                      # or eps_grid: {start, stop, count}
//     a: 0.5
//     refine_depth: 2
//     C1: 3
//     C2: 3
//     samples: 64
//   oracle:                         # optional block
//     enabled: true
//     h: 0.01
//     pad: 0.5
//     richardson: true
//   output:                         # optional block
//     format: csv                   # csv | json
//     path: out.csv

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spectral_tail/potential.hpp"

namespace spectral_tail::cli {

struct EpsGrid {
  double start;
  double stop;
  std::size_t count;
  bool operator==(const EpsGrid&) const = default;
};

/// Geometric grid start, ..., stop with `count` points (endpoints exact).
std::vector<double> expand_grid(const EpsGrid& grid);

/// Parses START:STOP:COUNT; throws ConfigError.
EpsGrid parse_grid_flag(std::string_view text);

enum class OutputFormat { csv, json };

struct PotentialConfig {
  Envelope envelope;
  Coefficients coefficients;
  std::vector<Knot> p_knots;  // one knot with x = 0 means constant
  bool p_constant = true;
  DecayClass decay_class;
  double m = 0.0;
  bool fixed_eigenbasis = true;
  bool operator==(const PotentialConfig&) const = default;
};

struct RunBlock {
  std::optional<double> eps;
  std::optional<EpsGrid> eps_grid;
  double a = 0.5;
  std::optional<std::size_t> refine_depth;
  double C1 = 3.0;
  double C2 = 3.0;
  std::size_t samples = 64;
  bool operator==(const RunBlock&) const = default;
};

struct OracleBlock {
  bool enabled = true;
  std::optional<double> h;
  double pad = 0.5;
  bool richardson = true;
  bool operator==(const OracleBlock&) const = default;
};

struct OutputBlock {
  OutputFormat format = OutputFormat::csv;
  std::optional<std::string> path;
  bool operator==(const OutputBlock&) const = default;
};

struct RunConfig {
  PotentialConfig potential;
  RunBlock run;
  OracleBlock oracle;
  OutputBlock output;

  BranchFamily family() const;
  Stiffness stiffness() const;
  bool operator==(const RunConfig&) const = default;
};

/// Parses and validates a configuration. Errors are ConfigError with
/// "source:line:column: field: message" diagnostics.
RunConfig parse_config(std::string_view text, std::string_view source = "config");
RunConfig load_config(const std::string& path);

/// YAML text that parse_config maps back to an equal RunConfig.
std::string serialize_config(const RunConfig& config);

/// Checks cross-field constraints (ranges of a, eps, grid, oracle settings)
/// and that the potential block constructs. Throws ConfigError.
void check_config(const RunConfig& config);

}  // namespace spectral_tail::cli
