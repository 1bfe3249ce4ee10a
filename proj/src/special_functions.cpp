#include "fsonoma/special_functions.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "fsonoma/errors.hpp"

namespace fsonoma {
namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 10000;

// Taylor coefficients of 1/Gamma(z) about z = 0: 1/Gamma(z) = sum c[k] z^k.
constexpr std::array<double, 29> kRecipGamma = {
    0.0,
    1.0,
    0.57721566490153286061,
    -0.65587807152025388108,
    -0.042002635034095235529,
    0.1665386113822914895,
    -0.042197734555544336748,
    -0.0096219715278769735621,
    0.0072189432466630995424,
    -0.0011651675918590651121,
    -0.00021524167411495097282,
    0.00012805028238811618615,
    -0.000020134854780788238656,
    -1.2504934821426706573e-6,
    1.1330272319816958824e-6,
    -2.0563384169776071035e-7,
    6.1160951044814158179e-9,
    5.0020076444692229301e-9,
    -1.1812745704870201446e-9,
    1.0434267116911005105e-10,
    7.782263439905071254e-12,
    -3.6968056186422057082e-12,
    5.100370287454475979e-13,
    -2.0583260535665067832e-14,
    -5.3481225394230179824e-15,
    1.2267786282382607902e-15,
    -1.1812593016974587695e-16,
    1.1866922547516003326e-18,
    1.4123806553180317816e-18,
};

struct TemmeGammas {
  double gam1;   // (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu)
  double gam2;   // (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2
  double gampl;  // 1/Gamma(1+mu)
  double gammi;  // 1/Gamma(1-mu)
};

// |mu| <= 1/2. 1/Gamma(1+mu) = sum_k c[k] mu^(k-1); odd k gives the even
// part (gam2), even k the odd part, so gam1 has no cancellation at mu -> 0.
TemmeGammas temme_gammas(double mu) {
  double even = 0.0;
  double odd_over_mu = 0.0;
  for (std::size_t k = kRecipGamma.size() - 1; k >= 1; --k) {
    if (k % 2 == 1) {
      even = even * mu * mu + kRecipGamma[k];
    } else {
      odd_over_mu = odd_over_mu * mu * mu + kRecipGamma[k];
    }
  }
  TemmeGammas g{};
  g.gam2 = even;
  g.gam1 = -odd_over_mu;
  g.gampl = even + mu * odd_over_mu;
  g.gammi = even - mu * odd_over_mu;
  return g;
}

struct LogPair {
  double log_k_mu;  // log K_mu(x)
  double ratio;     // K_{mu+1}(x) / K_mu(x)
};

LogPair temme_series(double mu, double x) {
  const double x2 = 0.5 * x;
  const double pimu = std::numbers::pi * mu;
  const double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
  double d = -std::log(x2);
  double e = mu * d;
  const double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
  const TemmeGammas g = temme_gammas(mu);
  double ff = fact * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * d);
  double sum = ff;
  e = std::exp(e);
  double p = 0.5 * e / g.gampl;
  double q = 0.5 / (e * g.gammi);
  double c = 1.0;
  d = x2 * x2;
  double sum1 = p;
  int i = 1;
  for (; i <= kMaxIter; ++i) {
    ff = (i * ff + p + q) / (i * i - mu * mu);
    c *= d / i;
    p /= i - mu;
    q /= i + mu;
    const double del = c * ff;
    sum += del;
    sum1 += c * (p - i * ff);
    if (std::abs(del) < std::abs(sum) * kEps) break;
  }
  if (i > kMaxIter) throw NumericError("bessel_k: Temme series did not converge", 0.0);
  return {std::log(sum), sum1 * (2.0 / x) / sum};
}

LogPair steed_cf2(double mu, double x) {
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25 - mu * mu;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  int i = 1;
  for (; i <= kMaxIter; ++i) {
    a -= 2 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps) break;
  }
  if (i > kMaxIter) throw NumericError("bessel_k: continued fraction did not converge", 0.0);
  h *= a1;
  const double log_k = 0.5 * std::log(std::numbers::pi / (2.0 * x)) - x - std::log(s);
  return {log_k, (mu + x + 0.5 - h) / x};
}

}  // namespace

double log_bessel_k(double nu, double x) {
  if (!(x > 0.0)) throw DomainError("bessel_k: argument must be positive");
  if (!std::isfinite(nu)) throw DomainError("bessel_k: order must be finite");
  nu = std::abs(nu);
  const int steps = static_cast<int>(nu + 0.5);
  const double mu = nu - steps;

  LogPair start = x < 2.0 ? temme_series(mu, x) : steed_cf2(mu, x);
  double log_k = start.log_k_mu;
  double ratio = start.ratio;
  const double two_over_x = 2.0 / x;
  // K_{m+1} = K_{m-1} + (2m/x) K_m, carried as log K_m and K_{m+1}/K_m.
  for (int i = 1; i <= steps; ++i) {
    log_k += std::log(ratio);
    ratio = (mu + i) * two_over_x + 1.0 / ratio;
  }
  return log_k;
}

double bessel_k(double nu, double x) { return std::exp(log_bessel_k(nu, x)); }

}  // namespace fsonoma
