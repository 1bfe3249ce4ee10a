#include "fsonoma/channel_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "fsonoma/errors.hpp"
#include "fsonoma/special_functions.hpp"

namespace fsonoma {

double visibility_exponent(double visibility_km) {
  if (!(visibility_km > 1.0 && visibility_km <= 50.0)) {
    std::ostringstream msg;
    msg << "visibility " << visibility_km
        << " km is outside the supported bands (haze 1-6 km, average 6-50 km)";
    throw DomainError(msg.str());
  }
  if (visibility_km <= 6.0) return 0.16 * visibility_km + 0.34;
  return 1.3;
}

double attenuation_coefficient(const AtmosphericConfig& atm) {
  if (!(atm.wavelength_nm > 0.0)) throw DomainError("wavelength must be positive");
  const double q = visibility_exponent(atm.visibility_km);
  return 3.91 / atm.visibility_km * std::pow(atm.wavelength_nm / 550.0, -q);
}

double path_loss(double attenuation_per_km, double distance_km) {
  if (!(distance_km >= 0.0)) throw DomainError("link distance must be nonnegative");
  if (!(attenuation_per_km >= 0.0)) throw DomainError("attenuation must be nonnegative");
  return std::exp(-attenuation_per_km * distance_km);
}

ShapeParameters rytov_to_shape(double rytov_variance) {
  if (!(rytov_variance > 0.0) || !std::isfinite(rytov_variance)) {
    throw DomainError("Rytov variance must be positive");
  }
  const double s = rytov_variance;
  const double s125 = std::pow(s, 12.0 / 5.0);
  const double ea = 0.49 * s / std::pow(1.0 + 1.11 * s125, 7.0 / 6.0);
  const double eb = 0.51 * s / std::pow(1.0 + 0.69 * s125, 5.0 / 6.0);
  return {1.0 / std::expm1(ea), 1.0 / std::expm1(eb)};
}

TurbulenceSpec TurbulenceSpec::from_rytov(double rytov_variance) {
  const ShapeParameters shape = rytov_to_shape(rytov_variance);
  return {rytov_variance, shape.alpha, shape.beta};
}

GammaGammaDist::GammaGammaDist(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    throw DomainError("gamma-gamma shape parameters must be positive and finite");
  }
  const double ab = alpha * beta;
  log_norm_ = std::numbers::ln2 + 0.5 * (alpha + beta) * std::log(ab) - std::lgamma(alpha) -
              std::lgamma(beta);
  origin_power_ = std::max(1.0, 1.0 / std::min(alpha, beta));
}

GammaGammaDist GammaGammaDist::from_rytov(double rytov_variance) {
  const ShapeParameters shape = rytov_to_shape(rytov_variance);
  return {shape.alpha, shape.beta};
}

double GammaGammaDist::log_intensity_pdf(double intensity) const {
  if (!(intensity > 0.0)) throw DomainError("intensity must be positive");
  const double arg = 2.0 * std::sqrt(alpha_ * beta_ * intensity);
  return log_norm_ + (0.5 * (alpha_ + beta_) - 1.0) * std::log(intensity) +
         log_bessel_k(alpha_ - beta_, arg);
}

double GammaGammaDist::intensity_pdf(double intensity) const {
  if (std::isinf(intensity)) return 0.0;
  return std::exp(log_intensity_pdf(intensity));
}

quad::Options GammaGammaDist::cdf_options() {
  quad::Options opt;
  opt.abs_tol = 1e-200;
  opt.rel_tol = 1e-11;
  return opt;
}

namespace {
constexpr auto kOne = [](double) { return 1.0; };
}

double GammaGammaDist::intensity_cdf(double x) const {
  if (!(x >= 0.0)) throw DomainError("CDF argument must be nonnegative");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return std::min(1.0, integrate(kOne, 0.0, x, cdf_options()).value);
}

double GammaGammaDist::intensity_sf(double x) const {
  if (!(x >= 0.0)) throw DomainError("survival argument must be nonnegative");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return std::min(1.0, integrate(kOne, x, std::numeric_limits<double>::infinity(),
                                 cdf_options())
                           .value);
}

double GammaGammaDist::h_pdf(double h) const {
  if (!(h > 0.0)) throw DomainError("squared intensity must be positive");
  const double root = std::sqrt(h);
  return intensity_pdf(root) / (2.0 * root);
}

double GammaGammaDist::h_cdf(double y) const {
  if (!(y >= 0.0)) throw DomainError("CDF argument must be nonnegative");
  return intensity_cdf(std::sqrt(y));
}

double GammaGammaDist::h_sf(double y) const {
  if (!(y >= 0.0)) throw DomainError("survival argument must be nonnegative");
  return intensity_sf(std::sqrt(y));
}

double GammaGammaDist::h_mean() const { return (1.0 + 1.0 / alpha_) * (1.0 + 1.0 / beta_); }

double GammaGammaDist::intensity_variance() const {
  return 1.0 / alpha_ + 1.0 / beta_ + 1.0 / (alpha_ * beta_);
}

double GammaGammaDist::sample_intensity(Rng& rng) const {
  std::gamma_distribution<double> large_scale(alpha_, 1.0 / alpha_);
  std::gamma_distribution<double> small_scale(beta_, 1.0 / beta_);
  const double x = large_scale(rng);
  const double y = small_scale(rng);
  return x * y;
}

// ---------------------------------------------------------------------------

namespace {
constexpr double kTableFirst = 1e-4;
constexpr double kTableLast = 1e3;
constexpr double kTableRatio = 1.03;
}  // namespace

IntensityMassTable::IntensityMassTable(const GammaGammaDist& dist) : dist_(dist) {
  first_ = kTableFirst;
  log_ratio_ = std::log(kTableRatio);
  const int panels = static_cast<int>(std::ceil(std::log(kTableLast / kTableFirst) / log_ratio_));
  edges_.resize(panels + 1);
  for (int j = 0; j <= panels; ++j) edges_[j] = first_ * std::exp(j * log_ratio_);

  std::vector<double> panel_mass(panels);
  for (int j = 0; j < panels; ++j) panel_mass[j] = partial(edges_[j], edges_[j + 1]);

  below_.resize(panels + 1);
  above_.resize(panels + 1);
  below_[0] = dist_.intensity_cdf(edges_.front());
  for (int j = 0; j < panels; ++j) below_[j + 1] = below_[j] + panel_mass[j];
  above_[panels] = dist_.intensity_sf(edges_.back());
  for (int j = panels - 1; j >= 0; --j) above_[j] = above_[j + 1] + panel_mass[j];
}

double IntensityMassTable::partial(double lo, double hi) const {
  if (!(hi > lo)) return 0.0;
  return dist_.integrate(kOne, lo, hi, GammaGammaDist::cdf_options()).value;
}

int IntensityMassTable::panel_of(double x) const {
  const int j = static_cast<int>(std::floor(std::log(x / first_) / log_ratio_));
  const int last = static_cast<int>(edges_.size()) - 2;
  int k = std::clamp(j, 0, last);
  // Guard the floor against rounding at panel edges.
  while (k > 0 && x < edges_[k]) --k;
  while (k < last && x >= edges_[k + 1]) ++k;
  return k;
}

double IntensityMassTable::cdf(double x) const {
  if (!(x >= 0.0)) throw DomainError("CDF argument must be nonnegative");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x <= edges_.front()) return dist_.intensity_cdf(x);
  if (x >= edges_.back()) return 1.0 - dist_.intensity_sf(x);
  const int j = panel_of(x);
  if (below_[j] < 0.5) return below_[j] + partial(edges_[j], x);
  return 1.0 - sf(x);
}

double IntensityMassTable::sf(double x) const {
  if (!(x >= 0.0)) throw DomainError("survival argument must be nonnegative");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x >= edges_.back()) return dist_.intensity_sf(x);
  if (x <= edges_.front()) return 1.0 - dist_.intensity_cdf(x);
  const int j = panel_of(x);
  if (below_[j] >= 0.5) return above_[j + 1] + partial(x, edges_[j + 1]);
  return 1.0 - cdf(x);
}

double IntensityMassTable::mass(double lo, double hi) const {
  lo = std::max(lo, 0.0);
  if (!(hi > lo)) return 0.0;
  if (std::isinf(hi)) return sf(lo);
  if (lo == 0.0) return cdf(hi);
  if (lo < edges_.front() || hi > edges_.back()) {
    // Outside the table: split off the pieces beyond the edges.
    const double a = std::max(lo, edges_.front());
    const double b = std::min(hi, edges_.back());
    double m = 0.0;
    if (lo < edges_.front()) m += partial(lo, std::min(hi, edges_.front()));
    if (hi > edges_.back()) m += partial(std::max(lo, edges_.back()), hi);
    if (b > a) m += mass(a, b);
    return m;
  }
  const int jl = panel_of(lo);
  const int jh = panel_of(hi);
  if (jl == jh) return partial(lo, hi);
  // Difference whichever cumulative array is small at the far end, so deep
  // tails keep relative accuracy.
  const double middle = below_[jh] <= 0.5 ? below_[jh] - below_[jl + 1]
                                          : above_[jl + 1] - above_[jh];
  return partial(lo, edges_[jl + 1]) + middle + partial(edges_[jh], hi);
}

double IntensityMassTable::h_cdf(double y) const { return cdf(std::sqrt(y)); }
double IntensityMassTable::h_sf(double y) const { return sf(std::sqrt(y)); }
IntensityMassTable::Split IntensityMassTable::h_split(double y) const {
  const double f = h_cdf(y);
  if (f <= 0.5) return {f, 1.0 - f};
  const double s = h_sf(y);
  return {1.0 - s, s};
}

double IntensityMassTable::h_mass(double lo, double hi) const {
  if (!(hi > lo)) return 0.0;
  return mass(std::sqrt(std::max(lo, 0.0)), std::sqrt(hi));
}

}  // namespace fsonoma
