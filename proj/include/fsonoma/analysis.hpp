#pragma once

// Quadrature evaluation of the SIC outage events, coverage and ergodic sum
// rate over the ordered gamma-gamma channel.
//
// The decode of rank k < K succeeds when h_k >= nu, with
//   nu = phi_k (A + rho sum_{i>k} mu_i^2 c_i^2 h_i) / (rho mu_k^2 c_k^2),
//   phi_k = exp(2 (R_k + eps_phi)) - 1,  c_i = L_i a_i = 10^(-(i-1) zeta/10),
// and the weakest rank succeeds when h_K >= psi_K = A phi_K / (rho mu_K^2 c_K^2).
// These thresholds drop the [.]^+ clamp of the rate (they assume the
// unclamped rate is positive); the Monte Carlo engine evaluates the exact
// event instead.
//
// Failure probabilities are integrated directly rather than as 1 - success,
// so outages far below machine epsilon keep their relative accuracy.

#include <cstdint>
#include <span>
#include <vector>

#include "fsonoma/monte_carlo.hpp"
#include "fsonoma/noma_link.hpp"
#include "fsonoma/order_statistics.hpp"
#include "fsonoma/quadrature.hpp"

namespace fsonoma {

struct AnalysisOptions {
  quad::Options quad{};  // 1e-9 absolute, 1e-8 relative
  /// Lower-rank dimensions up to this count use nested quadrature; above
  /// it, randomized quasi-Monte Carlo.
  int max_quadrature_dims = 2;
  int qmc_points = 8192;
  int qmc_shifts = 16;
  std::uint64_t qmc_seed = 0x5eed;
};

/// Decode thresholds of a configuration.
class OutageThresholds {
 public:
  explicit OutageThresholds(const SystemConfig& cfg);

  int user_count() const { return static_cast<int>(phi_.size()); }
  /// Required SINR phi_k of rank k.
  double phi(int rank) const { return phi_[rank - 1]; }
  /// nu for rank k given h_{k+1..K} (`lower` holds exactly K - k values).
  double nu(int rank, std::span<const double> lower) const;
  /// psi_K of the weakest rank.
  double psi() const;
  /// Per-rank SNR scale s_i = rho mu_i^2 c_i^2 / A.
  double scale(int rank) const { return scale_[rank - 1]; }

 private:
  std::vector<double> phi_;
  std::vector<double> scale_;
};

struct EventProbability {
  double failure = 0.0;  // P(E_k)
  double error = 0.0;    // absolute error estimate of `failure`
  bool quasi_monte_carlo = false;

  double success() const { return 1.0 - failure; }
};

/// P(E_k) for a rank k < K.
EventProbability failure_prob_rank_k(const SystemConfig& cfg, const OrderedChannelSet& set,
                                     int rank, const AnalysisOptions& opt = {});

/// P(E_K) = 1 - [1 - F(psi_K)]^K.
EventProbability failure_prob_weakest(const SystemConfig& cfg, const OrderedChannelSet& set);

/// P(E_k^c) for k < K.
double success_prob_rank_k(const SystemConfig& cfg, const OrderedChannelSet& set, int rank,
                           const AnalysisOptions& opt = {});
/// P(E_K^c) = [1 - F(psi_K)]^K.
double success_prob_weakest(const SystemConfig& cfg, const OrderedChannelSet& set);

struct OutageResult {
  std::vector<EventProbability> events;  // by decode rank
  std::vector<double> per_user_outage;   // 1 - prod_{i<=k} P(E_i^c)
  double coverage = 1.0;                 // prod_k (1 - P_k^out)

  double success(int rank) const { return events.at(rank - 1).success(); }
};

/// Outage of every rank under the product form over events, and coverage.
OutageResult outage_per_user(const SystemConfig& cfg, const OrderedChannelSet& set,
                             const AnalysisOptions& opt = {});

enum class RateMethod { Quadrature, MonteCarlo };

struct ErgodicRate {
  double value = 0.0;    // headline: unclamped telescoped form for NOMA
  double clamped = 0.0;  // sum of clamped per-user rates
  double error = 0.0;    // quadrature error or MC standard error of `value`
  double clamped_error = 0.0;
  RateMethod method = RateMethod::Quadrature;
};

struct ErgodicOptions {
  RateMethod method = RateMethod::Quadrature;
  std::int64_t mc_trials = 1000000;
  mc::RngPolicy policy{};
  quad::Options quad{};
};

/// E[1/2 log(1 + rho sum (mu_k c_k)^2 h_k / A) - K eps_phi]. Quadrature
/// over the ordered joint density for K <= 2, Monte Carlo otherwise.
ErgodicRate ergodic_sum_rate_noma(const SystemConfig& cfg, const OrderedChannelSet& set,
                                  const ErgodicOptions& opt = {});

/// Ergodic sum rate of the equal-time TDMA baseline; quadrature runs one
/// 1-D integral per rank against the ordered marginals for any K.
ErgodicRate ergodic_sum_rate_oma(const SystemConfig& cfg, const OrderedChannelSet& set,
                                 const ErgodicOptions& opt = {});

}  // namespace fsonoma
