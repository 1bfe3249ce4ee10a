#pragma once

// Uplink NOMA link layer: power back-off plan, SIC decode order and the
// per-user achievable rates of the IM/DD multiple-access bound, plus an
// equal-time TDMA baseline.
//
// Rates are in nats per channel use unless RateConstants::log_base says
// otherwise. Rank k = 1 is the strongest user and is decoded first; target
// rate and mu attach to the rank, not to a physical user.

#include <optional>
#include <span>
#include <vector>

#include "fsonoma/channel_model.hpp"

namespace fsonoma {

enum class LogBase { Natural, Binary };

struct RateConstants {
  double eps_phi = 0.016;
  double eps_mu = 0.0015;
  LogBase log_base = LogBase::Natural;

  /// A = 9 (1 + eps_mu)^2.
  double peak_factor() const { return 9.0 * (1.0 + eps_mu) * (1.0 + eps_mu); }
  /// 1/2 log(1 + snr) in the configured base.
  double half_log1p(double snr) const;
  /// SINR needed to reach `target`: b^(2 (target + eps_phi)) - 1.
  double required_sinr(double target) const;
};

struct UserLink {
  double distance_km = 1.0;
  double target_rate = 0.5;
  double mu = 0.5;
};

struct PowerPlan {
  double p_aim = 1.0;
  double zeta_db = 0.0;
  std::vector<double> path_loss;     // L_k
  std::vector<double> coefficients;  // a_k = 1 / (L_k 10^((k-1) zeta / 10))

  /// P_k = a_k P_aim.
  double transmit_power(int rank) const { return coefficients.at(rank - 1) * p_aim; }
  /// L_k a_k = 10^(-(k-1) zeta / 10).
  static double backoff(int rank, double zeta_db);
};

PowerPlan make_power_plan(std::span<const UserLink> links, double attenuation_per_km,
                          double p_aim, double zeta_db);

struct SystemConfig {
  std::vector<UserLink> users;  // by decode rank
  PowerPlan plan;
  double rho = 1e3;             // P_aim^2 / (N0 B)
  std::optional<double> noise_psd;
  std::optional<double> bandwidth;
  RateConstants constants;

  int user_count() const { return static_cast<int>(users.size()); }
  double zeta_db() const { return plan.zeta_db; }

  /// Throws DomainError when an invariant is violated.
  void validate() const;
};

/// Builds and validates a configuration; the plan comes from the users'
/// distances under `atm`.
SystemConfig make_system(std::vector<UserLink> users, const AtmosphericConfig& atm, double zeta_db,
                         double rho, double p_aim = 1.0, RateConstants constants = {});

struct ChannelDraw {
  std::vector<double> intensity;     // I per physical user
  std::vector<double> gain;          // g = L I per physical user
  std::vector<int> user_at_rank;     // physical user decoded at rank k (0-based)
  std::vector<double> h;             // I^2 by decode rank, non-increasing
};

/// Physical users sorted by descending intensity, ties by ascending index.
std::vector<int> decode_order(std::span<const double> intensities);

ChannelDraw make_draw(const SystemConfig& cfg, std::span<const double> intensities);

struct RateResult {
  std::vector<double> per_user;  // by decode rank
  double sum_rate = 0.0;
};

enum class Clamp { On, Off };

/// Per-rank SNR scales of a configuration, ready for tight loops.
class RateModel {
 public:
  explicit RateModel(const SystemConfig& cfg);

  int user_count() const { return static_cast<int>(noma_scale_.size()); }

  /// rho mu_k^2 10^(-2 (k-1) zeta / 10) / A, so SINR_k =
  /// scale_k h_k / (1 + sum_{i>k} scale_i h_i).
  double noma_scale(int rank) const { return noma_scale_[rank - 1]; }
  /// rho mu_k^2 / A: no back-off and no interference.
  double oma_scale(int rank) const { return oma_scale_[rank - 1]; }

  /// SIC SINR of every rank. `h` is by decode rank.
  void sinr(std::span<const double> h, std::span<double> out) const;

  double rate(double sinr, Clamp clamp) const;

  void sic_rates(std::span<const double> h, std::span<double> out, Clamp clamp) const;
  void oma_rates(std::span<const double> h, std::span<double> out) const;

  /// 1/2 log(1 + sum_k scale_k h_k) - K eps_phi, the unclamped sum of the
  /// SIC rates.
  double telescoped_sum_rate(std::span<const double> h) const;

  const RateConstants& constants() const { return constants_; }

 private:
  std::vector<double> noma_scale_;
  std::vector<double> oma_scale_;
  RateConstants constants_;
};

RateResult sic_rates(const SystemConfig& cfg, const ChannelDraw& draw, Clamp clamp = Clamp::On);
RateResult oma_rates(const SystemConfig& cfg, const ChannelDraw& draw);

}  // namespace fsonoma
