#pragma once

// Atmospheric attenuation and gamma-gamma scintillation.
//
// Intensity I is unit-mean gamma-gamma; h = I^2 is the squared intensity
// the NOMA analysis works with. Path loss is carried separately, g = L * I.

#include <vector>

#include "fsonoma/quadrature.hpp"
#include "fsonoma/rng.hpp"

namespace fsonoma {

struct AtmosphericConfig {
  double visibility_km = 16.0;
  double wavelength_nm = 1550.0;
};

/// Size-distribution exponent q of the Kim model: 1.3 for 6 < V <= 50 km,
/// 0.16 V + 0.34 for haze 1 < V <= 6 km.
double visibility_exponent(double visibility_km);

/// Beers-Lambert attenuation coefficient in 1/km.
double attenuation_coefficient(const AtmosphericConfig& atm);

/// exp(-attenuation * distance).
double path_loss(double attenuation_per_km, double distance_km);

struct ShapeParameters {
  double alpha;
  double beta;
};

/// Gamma-gamma shapes for a plane wave under the given Rytov variance.
ShapeParameters rytov_to_shape(double rytov_variance);

struct TurbulenceSpec {
  double rytov_variance;
  double alpha;
  double beta;

  static TurbulenceSpec from_rytov(double rytov_variance);
};

/// Unit-mean gamma-gamma distribution of the received intensity.
class GammaGammaDist {
 public:
  GammaGammaDist(double alpha, double beta);
  explicit GammaGammaDist(const TurbulenceSpec& t) : GammaGammaDist(t.alpha, t.beta) {}
  static GammaGammaDist from_rytov(double rytov_variance);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  double log_intensity_pdf(double intensity) const;
  double intensity_pdf(double intensity) const;
  /// P(I <= x), adaptive quadrature of the pdf.
  double intensity_cdf(double x) const;
  /// P(I > x), integrated over the upper tail directly.
  double intensity_sf(double x) const;

  /// Density of h = I^2, f_I(sqrt h) / (2 sqrt h).
  double h_pdf(double h) const;
  /// P(h <= y). F(0) = 0, F(inf) = 1.
  double h_cdf(double y) const;
  double h_sf(double y) const;

  /// E[I^2] = (1 + 1/alpha)(1 + 1/beta).
  double h_mean() const;
  /// Var[I] = 1/alpha + 1/beta + 1/(alpha beta).
  double intensity_variance() const;

  /// Product of independent unit-mean Gamma(alpha) and Gamma(beta) variates.
  double sample_intensity(Rng& rng) const;

  /// Integral of f_I(i) * g(i) over [lo, hi]; hi may be +infinity.
  ///
  /// Near i = 0 the density behaves like i^(min(alpha, beta) - 1), so
  /// [0, hi] is integrated in u with i = hi * u^p, p = max(1, 1/min(alpha,
  /// beta)), which leaves a bounded integrand. [lo, inf) uses the
  /// t / (1 - t) map of quad::integrate_to_infinity.
  template <class G>
  quad::Result integrate(G&& g, double lo, double hi, const quad::Options& opt) const;

  /// Tolerances used for the distribution primitives.
  static quad::Options cdf_options();

 private:
  double alpha_;
  double beta_;
  double log_norm_;
  double origin_power_;
};

/// Precomputed panel masses of the intensity distribution so repeated CDF,
/// survival and interval-mass queries cost one short quadrature each.
/// Values keep relative accuracy in both tails.
class IntensityMassTable {
 public:
  explicit IntensityMassTable(const GammaGammaDist& dist);

  const GammaGammaDist& dist() const { return dist_; }

  double cdf(double x) const;
  double sf(double x) const;
  /// P(lo < I <= hi); 0 when hi <= lo.
  double mass(double lo, double hi) const;

  double h_cdf(double y) const;
  double h_sf(double y) const;
  /// P(lo < h <= hi).
  double h_mass(double lo, double hi) const;

  struct Split {
    double cdf;
    double sf;
  };
  /// CDF and survival of h at y that sum to one; the smaller of the two is
  /// computed directly so it keeps relative accuracy.
  Split h_split(double y) const;

 private:
  double partial(double lo, double hi) const;
  int panel_of(double x) const;

  GammaGammaDist dist_;
  double first_ = 0.0;
  double log_ratio_ = 0.0;
  std::vector<double> edges_;
  std::vector<double> below_;  // P(I <= edges_[j])
  std::vector<double> above_;  // P(I > edges_[j])
};

// ---------------------------------------------------------------------------

template <class G>
quad::Result GammaGammaDist::integrate(G&& g, double lo, double hi,
                                       const quad::Options& opt) const {
  quad::Result out;
  if (!(hi > lo)) return out;
  if (std::isinf(hi)) {
    if (lo <= 0.0) {
      // Split at the mean so the origin and the tail each get their own map.
      const quad::Result head = integrate(g, 0.0, 1.0, opt);
      const quad::Result tail = integrate(g, 1.0, hi, opt);
      return {head.value + tail.value, head.error + tail.error,
              head.evaluations + tail.evaluations, head.converged && tail.converged};
    }
    return quad::integrate_to_infinity(
        [&](double i) { return intensity_pdf(i) * g(i); }, lo, opt);
  }
  if (lo <= 0.0 && hi > 1.0) {
    const quad::Result head = integrate(g, 0.0, 1.0, opt);
    const quad::Result tail = integrate(g, 1.0, hi, opt);
    return {head.value + tail.value, head.error + tail.error,
            head.evaluations + tail.evaluations, head.converged && tail.converged};
  }
  if (lo > 0.0) {
    if (hi - lo <= 1.0) {
      return quad::integrate([&](double i) { return intensity_pdf(i) * g(i); }, lo, hi, opt);
    }
    // Wide range: i = lo + t / (1 - t) keeps the nodes where the mass is.
    const double t_hi = (hi - lo) / (1.0 + hi - lo);
    return quad::integrate(
        [&](double t) {
          const double w = 1.0 - t;
          const double i = lo + t / w;
          return intensity_pdf(i) * g(i) / (w * w);
        },
        0.0, t_hi, opt);
  }
  const double p = origin_power_;
  return quad::integrate(
      [&](double u) {
        if (u <= 0.0) return 0.0;
        const double i = hi * std::pow(u, p);
        if (i <= 0.0) return 0.0;
        return intensity_pdf(i) * g(i) * hi * p * std::pow(u, p - 1.0);
      },
      0.0, 1.0, opt);
}

}  // namespace fsonoma
