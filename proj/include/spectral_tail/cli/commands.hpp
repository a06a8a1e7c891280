#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spectral_tail/cli/config.hpp"

namespace spectral_tail::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidationFailed = 1,
  kExitConfig = 2,
  kExitAdmissibility = 3,
  kExitNumeric = 4,
};

/// Worker count: SPECTRAL_TAIL_THREADS if set (>= 1), else the hardware
/// concurrency.
unsigned thread_budget();

struct SweepRow {
  double eps;
  double s_lower;
  double s_upper;
  double weyl;
  std::optional<double> oracle_sum;
  std::optional<double> oracle_err;
};

/// Bracket, Weyl sum and (if enabled) oracle at each eps. Inadmissible points
/// are dropped and reported on `warnings` in grid order.
std::vector<SweepRow> run_sweep(const RunConfig& config,
                                const std::vector<double>& eps_values,
                                unsigned threads, std::ostream& warnings);

/// Header eps,s_lower,s_upper,weyl,oracle_sum,ratio_lower,ratio_upper,
/// ratio_oracle,oracle_err followed by one row per point.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Full command-line entry point; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace spectral_tail::cli
