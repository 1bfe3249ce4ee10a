#include "fsonoma/noma_link.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fsonoma/errors.hpp"
#include "fsonoma/order_statistics.hpp"

namespace fsonoma {

double RateConstants::half_log1p(double snr) const {
  const double nats = 0.5 * std::log1p(snr);
  return log_base == LogBase::Natural ? nats : nats / std::numbers::ln2;
}

double RateConstants::required_sinr(double target) const {
  const double exponent = 2.0 * (target + eps_phi);
  return log_base == LogBase::Natural ? std::expm1(exponent)
                                      : std::expm1(exponent * std::numbers::ln2);
}

double PowerPlan::backoff(int rank, double zeta_db) {
  return std::pow(10.0, -(rank - 1) * zeta_db / 10.0);
}

PowerPlan make_power_plan(std::span<const UserLink> links, double attenuation_per_km,
                          double p_aim, double zeta_db) {
  if (!(zeta_db >= 0.0)) throw DomainError("power back-off step must be nonnegative");
  if (!(p_aim > 0.0)) throw DomainError("target arrived power must be positive");
  PowerPlan plan;
  plan.p_aim = p_aim;
  plan.zeta_db = zeta_db;
  for (std::size_t k = 0; k < links.size(); ++k) {
    const double loss = path_loss(attenuation_per_km, links[k].distance_km);
    plan.path_loss.push_back(loss);
    plan.coefficients.push_back(1.0 / (loss * std::pow(10.0, k * zeta_db / 10.0)));
  }
  return plan;
}

void SystemConfig::validate() const {
  if (users.empty()) throw DomainError("system needs at least one user");
  if (plan.coefficients.size() != users.size()) {
    throw DomainError("power plan does not match the user list");
  }
  if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("rho must be positive and finite");
  for (std::size_t k = 0; k < users.size(); ++k) {
    const UserLink& u = users[k];
    std::ostringstream where;
    where << "user " << k + 1 << ": ";
    if (!(u.mu >= 0.0 && u.mu <= 0.5)) throw DomainError(where.str() + "mu must lie in [0, 0.5]");
    if (!(u.target_rate >= 0.0)) throw DomainError(where.str() + "target rate must be >= 0");
    if (!(u.distance_km >= 0.0)) throw DomainError(where.str() + "distance must be >= 0");
  }
  if (noise_psd && bandwidth) {
    const double implied = plan.p_aim * plan.p_aim / (*noise_psd * *bandwidth);
    if (std::abs(implied - rho) > 1e-9 * rho) {
      throw DomainError("rho is inconsistent with p_aim^2 / (N0 B)");
    }
  }
}

SystemConfig make_system(std::vector<UserLink> users, const AtmosphericConfig& atm, double zeta_db,
                         double rho, double p_aim, RateConstants constants) {
  SystemConfig cfg;
  cfg.plan = make_power_plan(users, attenuation_coefficient(atm), p_aim, zeta_db);
  cfg.users = std::move(users);
  cfg.rho = rho;
  cfg.constants = constants;
  cfg.validate();
  return cfg;
}

std::vector<int> decode_order(std::span<const double> intensities) {
  return descending_order(intensities);
}

ChannelDraw make_draw(const SystemConfig& cfg, std::span<const double> intensities) {
  if (static_cast<int>(intensities.size()) != cfg.user_count()) {
    throw DomainError("one intensity per user is required");
  }
  ChannelDraw draw;
  draw.intensity.assign(intensities.begin(), intensities.end());
  draw.user_at_rank = decode_order(intensities);
  for (std::size_t j = 0; j < intensities.size(); ++j) {
    if (!(intensities[j] > 0.0)) throw DomainError("intensities must be positive");
    draw.gain.push_back(cfg.plan.path_loss[j] * intensities[j]);
  }
  for (int j : draw.user_at_rank) draw.h.push_back(intensities[j] * intensities[j]);
  return draw;
}

RateModel::RateModel(const SystemConfig& cfg) : constants_(cfg.constants) {
  const double a = constants_.peak_factor();
  for (int k = 1; k <= cfg.user_count(); ++k) {
    const double mu = cfg.users[k - 1].mu;
    const double c = PowerPlan::backoff(k, cfg.zeta_db());
    noma_scale_.push_back(cfg.rho * mu * mu * c * c / a);
    oma_scale_.push_back(cfg.rho * mu * mu / a);
  }
}

void RateModel::sinr(std::span<const double> h, std::span<double> out) const {
  double interference = 0.0;
  for (int k = user_count() - 1; k >= 0; --k) {
    const double signal = noma_scale_[k] * h[k];
    out[k] = signal / (1.0 + interference);
    interference += signal;
  }
}

double RateModel::rate(double sinr, Clamp clamp) const {
  const double r = constants_.half_log1p(sinr) - constants_.eps_phi;
  return clamp == Clamp::On ? std::max(r, 0.0) : r;
}

void RateModel::sic_rates(std::span<const double> h, std::span<double> out, Clamp clamp) const {
  sinr(h, out);
  for (auto& v : out) v = rate(v, clamp);
}

void RateModel::oma_rates(std::span<const double> h, std::span<double> out) const {
  const double share = 1.0 / user_count();
  for (int k = 0; k < user_count(); ++k) out[k] = share * rate(oma_scale_[k] * h[k], Clamp::On);
}

double RateModel::telescoped_sum_rate(std::span<const double> h) const {
  double total = 0.0;
  for (int k = 0; k < user_count(); ++k) total += noma_scale_[k] * h[k];
  return constants_.half_log1p(total) - user_count() * constants_.eps_phi;
}

RateResult sic_rates(const SystemConfig& cfg, const ChannelDraw& draw, Clamp clamp) {
  const RateModel model(cfg);
  RateResult out;
  out.per_user.resize(cfg.user_count());
  model.sic_rates(draw.h, out.per_user, clamp);
  for (double r : out.per_user) out.sum_rate += r;
  return out;
}

RateResult oma_rates(const SystemConfig& cfg, const ChannelDraw& draw) {
  const RateModel model(cfg);
  RateResult out;
  out.per_user.resize(cfg.user_count());
  model.oma_rates(draw.h, out.per_user);
  for (double r : out.per_user) out.sum_rate += r;
  return out;
}

}  // namespace fsonoma
