#pragma once

// Experiment configuration files (JSON, schema in docs/config_schema.json).

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fsonoma/channel_model.hpp"
#include "fsonoma/noma_link.hpp"

namespace fsonoma {

/// Invalid configuration. what() reads "<source>:<line>: <message>".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& message);

  int line() const { return line_; }

 private:
  int line_;
};

enum class SchemeKind { Noma, Oma };

struct MonteCarloSettings {
  std::int64_t trials = 100000;  // 0 disables simulation
  std::uint64_t seed = 1;
  std::int64_t chunk_size = 10000;
};

struct ExperimentConfig {
  std::string scenario;
  std::string description;
  AtmosphericConfig atmosphere;
  std::vector<double> rytov_variances;
  std::vector<UserLink> users;  // by decode rank
  /// Optional sweep over target rates; each set has one rate per user and
  /// replaces the users' own target_rate.
  std::vector<std::vector<double>> target_rate_sets;
  std::vector<double> zeta_db;
  std::vector<double> rho_db;  // strictly increasing
  std::vector<SchemeKind> schemes{SchemeKind::Noma, SchemeKind::Oma};
  MonteCarloSettings monte_carlo;
  RateConstants constants;
  double p_aim = 1.0;
  std::string output;  // empty: standard output

  /// Target-rate sets to run: target_rate_sets, or the users' own rates.
  std::vector<std::vector<double>> rate_sets() const;
};

/// Parses and validates a configuration; `source` names it in diagnostics.
ExperimentConfig parse_config(std::string_view text, const std::string& source = "<config>");

ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace fsonoma
