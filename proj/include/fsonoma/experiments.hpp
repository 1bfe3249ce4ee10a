#pragma once

// Theory and Monte Carlo sweeps over an experiment configuration, and
// their CSV form.
//
// outage columns:  rho_dB,user_rank,zeta_dB,rytov_var,target_rate,
//                  outage_theory,outage_mc,mc_stderr,n_trials
// sumrate columns: rho_dB,scheme,rytov_var,zeta_dB,sum_rate,stderr_or_blank,method
//
// Numbers are written with 9 significant digits; absent values are blank.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fsonoma/config.hpp"

namespace fsonoma {

struct RunOptions {
  std::optional<std::uint64_t> seed;   // overrides monte_carlo.seed
  std::optional<std::int64_t> trials;  // overrides monte_carlo.trials
  int threads = 1;
};

struct OutageRow {
  double rho_db = 0.0;
  int user_rank = 1;
  double zeta_db = 0.0;
  double rytov_var = 0.0;
  double target_rate = 0.0;
  double outage_theory = 0.0;
  std::optional<double> outage_mc;
  std::optional<double> mc_stderr;
  std::int64_t n_trials = 0;
};

struct SumRateRow {
  double rho_db = 0.0;
  std::string scheme;  // noma | oma
  double rytov_var = 0.0;
  double zeta_db = 0.0;
  double sum_rate = 0.0;
  std::optional<double> std_error;
  std::string method;  // quadrature | mc
};

/// Seed of the sweep point with the given ordinal.
std::uint64_t point_seed(std::uint64_t master_seed, std::uint64_t point);

/// Rows ordered by rytov variance, target-rate set, zeta, rho, user rank.
std::vector<OutageRow> outage_sweep(const ExperimentConfig& cfg, const RunOptions& opt = {});

/// Rows ordered by rytov variance, zeta, rho, scheme, method. NOMA gets a
/// quadrature row for K <= 2; OMA always does.
std::vector<SumRateRow> sumrate_sweep(const ExperimentConfig& cfg, const RunOptions& opt = {});

void write_outage_csv(const std::vector<OutageRow>& rows, std::ostream& out);
void write_sumrate_csv(const std::vector<SumRateRow>& rows, std::ostream& out);

/// "%.9g"
std::string format_number(double v);

}  // namespace fsonoma
