#include "fsonoma/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "fsonoma/errors.hpp"

namespace fsonoma {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_factorial(int n) { return std::lgamma(n + 1.0); }

// Radical inverse of n in base b.
double radical_inverse(std::uint64_t n, unsigned base) {
  double inv = 1.0 / base;
  double factor = inv;
  double value = 0.0;
  while (n > 0) {
    value += static_cast<double>(n % base) * factor;
    n /= base;
    factor *= inv;
  }
  return value;
}

constexpr unsigned kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
                                43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101};

// S(a)^k - S(b)^k for a < b, formed from the mass between a and b so it
// stays accurate when both survivals are close to one.
double survival_power_gap(const IntensityMassTable& table, int k, double a, double b) {
  if (!(b > a)) return 0.0;
  const double sa = table.h_sf(a);
  if (std::isinf(b)) return std::pow(sa, k);
  const double between = table.h_mass(a, b);
  if (k == 1) return between;
  const double sb = table.h_sf(b);
  double sum = 0.0;
  for (int j = 0; j < k; ++j) sum += std::pow(sa, j) * std::pow(sb, k - 1 - j);
  return between * sum;
}

quad::Options inner_options(const quad::Options& outer) {
  quad::Options inner = outer;
  inner.abs_tol = outer.abs_tol * 1e-2;
  inner.rel_tol = outer.rel_tol * 1e-2;
  return inner;
}

// Upper bound of a variable x on the failure region x * (1 - slope) < offset.
double failure_bound(double offset, double slope) {
  if (slope >= 1.0) return kInf;
  return offset / (1.0 - slope);
}

}  // namespace

OutageThresholds::OutageThresholds(const SystemConfig& cfg) {
  cfg.validate();
  const RateModel model(cfg);
  for (int k = 1; k <= cfg.user_count(); ++k) {
    phi_.push_back(cfg.constants.required_sinr(cfg.users[k - 1].target_rate));
    scale_.push_back(model.noma_scale(k));
  }
}

double OutageThresholds::nu(int rank, std::span<const double> lower) const {
  if (rank < 1 || rank > user_count()) throw DomainError("rank out of range");
  if (static_cast<int>(lower.size()) != user_count() - rank) {
    throw DomainError("nu needs the h values of every lower rank");
  }
  const double phi = phi_[rank - 1];
  if (phi == 0.0) return 0.0;
  const double s = scale_[rank - 1];
  if (s == 0.0) return kInf;
  double interference = 1.0;
  for (std::size_t i = 0; i < lower.size(); ++i) interference += scale_[rank + i] * lower[i];
  return phi * interference / s;
}

double OutageThresholds::psi() const { return nu(user_count(), {}); }

EventProbability failure_prob_rank_k(const SystemConfig& cfg, const OrderedChannelSet& set,
                                     int rank, const AnalysisOptions& opt) {
  const int K = cfg.user_count();
  if (set.count() != K) throw DomainError("channel set size differs from the user count");
  if (rank < 1 || rank >= K) throw DomainError("rank must satisfy 1 <= k < K");
  const OutageThresholds th(cfg);
  const int k = rank;
  const int dims = K - k;
  const double phi = th.phi(k);
  EventProbability out;
  if (phi == 0.0) return out;
  if (th.scale(k) == 0.0) {
    out.failure = 1.0;
    return out;
  }

  const IntensityMassTable& table = set.table();
  const GammaGammaDist& dist = set.base();
  const double coeff = std::exp(log_factorial(K) - log_factorial(k));
  // nu = c0 + sum_i slope_i y_{k+i}
  const double c0 = phi / th.scale(k);
  std::vector<double> slope(dims);
  for (int i = 0; i < dims; ++i) slope[i] = phi * th.scale(k + 1 + i) / th.scale(k);

  const int quad_dims = std::min(opt.max_quadrature_dims, 2);
  if (dims == 1 && quad_dims >= 1) {
    const double y_hi = failure_bound(c0, slope[0]);
    auto integrand = [&](double j) {
      const double y = j * j;
      return survival_power_gap(table, k, y, c0 + slope[0] * y);
    };
    const auto r = dist.integrate(integrand, 0.0, std::sqrt(y_hi), opt.quad);
    out.failure = coeff * r.value;
    out.error = coeff * r.error;
  } else if (dims == 2 && quad_dims >= 2) {
    // Outer variable w = y_{k+2}, inner u = y_{k+1} in [w, u_hi(w)).
    const double w_hi = failure_bound(c0, slope[0] + slope[1]);
    const quad::Options inner_opt = inner_options(opt.quad);
    double inner_error = 0.0;
    auto outer = [&](double jw) {
      const double w = jw * jw;
      const double u_hi = failure_bound(c0 + slope[1] * w, slope[0]);
      if (!(u_hi > w)) return 0.0;
      auto inner = [&](double ju) {
        const double u = ju * ju;
        return survival_power_gap(table, k, u, c0 + slope[0] * u + slope[1] * w);
      };
      const auto r = dist.integrate(inner, jw, std::sqrt(u_hi), inner_opt);
      inner_error = std::max(inner_error, r.error);
      return r.value;
    };
    const auto r = dist.integrate(outer, 0.0, std::sqrt(w_hi), opt.quad);
    out.failure = coeff * r.value;
    out.error = coeff * (r.error + inner_error);
  } else {
    // Randomized Halton over the unordered lower ranks; each value is a
    // product of two gamma quantiles, squared.
    out.quasi_monte_carlo = true;
    const double sym = coeff / std::tgamma(dims + 1.0);
    const double lo = std::numeric_limits<double>::min();
    const double hi = 1.0 - std::numeric_limits<double>::epsilon();
    std::vector<double> shift_means;
    std::vector<double> y(dims);
    for (int s = 0; s < opt.qmc_shifts; ++s) {
      Rng rng = make_stream(opt.qmc_seed, static_cast<std::uint64_t>(s));
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      std::vector<double> shift(2 * dims);
      for (auto& v : shift) v = unit(rng);
      double sum = 0.0;
      for (int n = 1; n <= opt.qmc_points; ++n) {
        for (int i = 0; i < dims; ++i) {
          double u1 = radical_inverse(n, kPrimes[2 * i]) + shift[2 * i];
          double u2 = radical_inverse(n, kPrimes[2 * i + 1]) + shift[2 * i + 1];
          u1 = std::clamp(u1 - std::floor(u1), lo, hi);
          u2 = std::clamp(u2 - std::floor(u2), lo, hi);
          const double x = boost::math::gamma_p_inv(dist.alpha(), u1) / dist.alpha();
          const double z = boost::math::gamma_p_inv(dist.beta(), u2) / dist.beta();
          y[i] = (x * z) * (x * z);
        }
        std::sort(y.begin(), y.end(), std::greater<>());
        double nu = c0;
        for (int i = 0; i < dims; ++i) nu += slope[i] * y[i];
        sum += survival_power_gap(table, k, y[0], nu);
      }
      shift_means.push_back(sym * sum / opt.qmc_points);
    }
    double mean = 0.0;
    for (double v : shift_means) mean += v;
    mean /= shift_means.size();
    double var = 0.0;
    for (double v : shift_means) var += (v - mean) * (v - mean);
    var /= std::max<std::size_t>(1, shift_means.size() - 1);
    out.failure = mean;
    out.error = std::sqrt(var / shift_means.size());
  }
  out.failure = std::clamp(out.failure, 0.0, 1.0);
  return out;
}

EventProbability failure_prob_weakest(const SystemConfig& cfg, const OrderedChannelSet& set) {
  const int K = cfg.user_count();
  if (set.count() != K) throw DomainError("channel set size differs from the user count");
  const double psi = OutageThresholds(cfg).psi();
  EventProbability out;
  if (psi == 0.0) return out;
  if (std::isinf(psi)) {
    out.failure = 1.0;
    return out;
  }
  const auto [cdf, sf] = set.table().h_split(psi);
  out.failure = cdf < 0.5 ? -std::expm1(K * std::log1p(-cdf)) : 1.0 - std::pow(sf, K);
  out.error = K * GammaGammaDist::cdf_options().rel_tol * out.failure;
  return out;
}

double success_prob_rank_k(const SystemConfig& cfg, const OrderedChannelSet& set, int rank,
                           const AnalysisOptions& opt) {
  return failure_prob_rank_k(cfg, set, rank, opt).success();
}

double success_prob_weakest(const SystemConfig& cfg, const OrderedChannelSet& set) {
  return failure_prob_weakest(cfg, set).success();
}

OutageResult outage_per_user(const SystemConfig& cfg, const OrderedChannelSet& set,
                             const AnalysisOptions& opt) {
  const int K = cfg.user_count();
  OutageResult out;
  for (int k = 1; k < K; ++k) out.events.push_back(failure_prob_rank_k(cfg, set, k, opt));
  out.events.push_back(failure_prob_weakest(cfg, set));
  double log_success = 0.0;
  for (const auto& e : out.events) {
    log_success += std::log1p(-e.failure);
    out.per_user_outage.push_back(-std::expm1(log_success));
  }
  for (double p : out.per_user_outage) out.coverage *= 1.0 - p;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

ErgodicRate monte_carlo_rate(const SystemConfig& cfg, const OrderedChannelSet& set,
                             mc::Scheme scheme, const ErgodicOptions& opt) {
  ErgodicRate out;
  out.method = RateMethod::MonteCarlo;
  const auto v = mc::simulate_sum_rate(cfg, set.base(), scheme, opt.mc_trials, opt.policy,
                                       mc::SumRateForm::Telescoped);
  out.value = v.mean;
  out.error = v.std_error;
  if (scheme == mc::Scheme::Noma) {
    const auto c = mc::simulate_sum_rate(cfg, set.base(), scheme, opt.mc_trials, opt.policy,
                                         mc::SumRateForm::Clamped);
    out.clamped = c.mean;
    out.clamped_error = c.std_error;
  } else {
    out.clamped = out.value;
    out.clamped_error = out.error;
  }
  return out;
}

// E[g(h_1, ..., h_K)] over the ordered joint density, K <= 2.
template <class G>
quad::Result ordered_expectation(const OrderedChannelSet& set, G&& g, const quad::Options& opt) {
  const GammaGammaDist& dist = set.base();
  if (set.count() == 1) {
    return dist.integrate([&](double j) { return g(std::array<double, 2>{j * j, 0.0}); }, 0.0, kInf,
                          opt);
  }
  const quad::Options inner_opt = inner_options(opt);
  double inner_error = 0.0;
  auto outer = [&](double jw) {
    const auto r = dist.integrate(
        [&](double ju) { return g(std::array<double, 2>{ju * ju, jw * jw}); }, jw, kInf, inner_opt);
    inner_error = std::max(inner_error, r.error);
    return 2.0 * r.value;
  };
  quad::Result r = dist.integrate(outer, 0.0, kInf, opt);
  r.error += 2.0 * inner_error;
  return r;
}

}  // namespace

ErgodicRate ergodic_sum_rate_noma(const SystemConfig& cfg, const OrderedChannelSet& set,
                                  const ErgodicOptions& opt) {
  cfg.validate();
  if (set.count() != cfg.user_count()) {
    throw DomainError("channel set size differs from the user count");
  }
  if (opt.method == RateMethod::MonteCarlo || cfg.user_count() > 2) {
    return monte_carlo_rate(cfg, set, mc::Scheme::Noma, opt);
  }
  const RateModel model(cfg);
  const int K = cfg.user_count();
  ErgodicRate out;
  const auto literal = ordered_expectation(
      set,
      [&](const std::array<double, 2>& h) {
        return model.telescoped_sum_rate(std::span<const double>(h.data(), K));
      },
      opt.quad);
  const auto clamped = ordered_expectation(
      set,
      [&](const std::array<double, 2>& h) {
        std::array<double, 2> r{};
        model.sic_rates(std::span<const double>(h.data(), K), std::span<double>(r.data(), K),
                        Clamp::On);
        return r[0] + r[1];
      },
      opt.quad);
  out.value = literal.value;
  out.error = literal.error;
  out.clamped = clamped.value;
  out.clamped_error = clamped.error;
  return out;
}

ErgodicRate ergodic_sum_rate_oma(const SystemConfig& cfg, const OrderedChannelSet& set,
                                 const ErgodicOptions& opt) {
  cfg.validate();
  const int K = cfg.user_count();
  if (set.count() != K) throw DomainError("channel set size differs from the user count");
  if (opt.method == RateMethod::MonteCarlo) return monte_carlo_rate(cfg, set, mc::Scheme::Oma, opt);

  const RateModel model(cfg);
  const double zero_rate_snr = cfg.constants.required_sinr(0.0);
  ErgodicRate out;
  for (int k = 1; k <= K; ++k) {
    const double s = model.oma_scale(k);
    if (s == 0.0) continue;
    const double coeff = K * binomial(K - 1, k - 1);
    auto integrand = [&](double j) {
      const double y = j * j;
      const auto [cdf, sf] = set.table().h_split(y);
      return coeff * std::pow(cdf, K - k) * std::pow(sf, k - 1) * model.rate(s * y, Clamp::On);
    };
    const auto r = set.base().integrate(integrand, std::sqrt(zero_rate_snr / s), kInf, opt.quad);
    out.value += r.value / K;
    out.error += r.error / K;
  }
  out.clamped = out.value;
  out.clamped_error = out.error;
  return out;
}

}  // namespace fsonoma
