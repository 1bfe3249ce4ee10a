#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "fsonoma/errors.hpp"
#include "fsonoma/order_statistics.hpp"
#include "fsonoma/stats.hpp"

using namespace fsonoma;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
const GammaGammaDist kModerate = GammaGammaDist::from_rytov(1.0);
const GammaGammaDist kWeak = GammaGammaDist::from_rytov(0.1);

// Integral over h of g(h) f'(h) done in the intensity variable, h = i^2.
template <class G>
double integrate_h(const GammaGammaDist& d, G g) {
  return d.integrate([&](double i) { return g(i * i); }, 0.0, kInf, GammaGammaDist::cdf_options())
      .value;
}
}  // namespace

TEST_CASE("single user: the ordered marginal is the plain density") {
  const OrderedChannelSet set(1, kModerate);
  for (double h : {1e-3, 0.2, 1.0, 4.0, 30.0}) {
    CHECK(set.marginal_pdf(1, h) == doctest::Approx(kModerate.h_pdf(h)).epsilon(1e-14));
  }
  const double v[] = {0.7};
  CHECK(set.joint_pdf(v) == doctest::Approx(kModerate.h_pdf(0.7)).epsilon(1e-14));
}

TEST_CASE("marginals decompose the parent density") {
  for (int K : {2, 3, 5}) {
    const OrderedChannelSet set(K, kModerate);
    for (int n = 0; n < 50; ++n) {
      const double h = std::exp(-7.0 + n * 0.22);
      double sum = 0.0;
      for (int k = 1; k <= K; ++k) sum += set.marginal_pdf(k, h);
      const double target = K * kModerate.h_pdf(h);
      CAPTURE(h);
      CHECK(std::abs(sum / target - 1.0) <= 1e-10);
    }
  }
}

TEST_CASE("each ordered marginal integrates to one") {
  for (const auto& base : {kWeak, kModerate}) {
    for (int K : {2, 3}) {
      const OrderedChannelSet set(K, base);
      for (int k = 1; k <= K; ++k) {
        // f'(h) dh = f'(i^2) 2 i di and f_I(i) = 2 i f_h(i^2).
        const double total =
            integrate_h(base, [&](double h) {
              const double f = base.h_pdf(h);
              return f > 0.0 ? set.marginal_pdf(k, h) / f : 0.0;
            });
        CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("marginal cdf is the integral of the marginal density") {
  const OrderedChannelSet set(3, kModerate);
  for (int k = 1; k <= 3; ++k) {
    for (double y : {0.05, 0.6, 1.0, 2.5, 9.0}) {
      const double direct = kModerate
                                .integrate([&](double i) {
                                  const double h = i * i;
                                  return set.marginal_pdf(k, h) / kModerate.h_pdf(h);
                                },
                                           0.0, std::sqrt(y), GammaGammaDist::cdf_options())
                                .value;
      CHECK(set.marginal_cdf(k, y) == doctest::Approx(direct).epsilon(1e-9));
    }
  }
}

TEST_CASE("K=2 joint density integrates to one over the ordered quadrant") {
  const OrderedChannelSet set(2, kModerate);
  // Outer over h2 = j^2, inner over h1 = i^2 in [h2, inf).
  quad::Options opt;
  opt.abs_tol = 1e-10;
  opt.rel_tol = 1e-9;
  const double total = kModerate
                           .integrate(
                               [&](double j) {
                                 return kModerate
                                     .integrate(
                                         [&](double i) {
                                           const double v[] = {i * i, j * j};
                                           return set.joint_pdf(v) /
                                                  (kModerate.h_pdf(i * i) * kModerate.h_pdf(j * j));
                                         },
                                         j, kInf, opt)
                                     .value;
                               },
                               0.0, kInf, opt)
                           .value;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("joint density support and arity") {
  const OrderedChannelSet set(2, kModerate);
  const double unordered[] = {0.5, 0.9};
  CHECK(set.joint_pdf(unordered) == 0.0);
  const double negative[] = {0.5, -0.1};
  CHECK(set.joint_pdf(negative) == 0.0);
  const double ordered[] = {0.9, 0.5};
  CHECK(set.joint_pdf(ordered) ==
        doctest::Approx(2.0 * kModerate.h_pdf(0.9) * kModerate.h_pdf(0.5)).epsilon(1e-14));
  const double three[] = {3.0, 2.0, 1.0};
  CHECK_THROWS_AS(set.joint_pdf(three), DomainError);
  CHECK_THROWS_AS(set.marginal_pdf(0, 1.0), DomainError);
  CHECK_THROWS_AS(set.marginal_pdf(3, 1.0), DomainError);
  CHECK_THROWS_AS(OrderedChannelSet(0, kModerate), DomainError);
}

TEST_CASE("sampler output is ordered and deterministic") {
  const OrderedChannelSet set(4, kModerate);
  Rng rng = make_stream(1, 0);
  for (int n = 0; n < 10000; ++n) {
    const auto h = set.sample(rng);
    for (int k = 1; k < 4; ++k) REQUIRE(h[k] <= h[k - 1]);
  }
  Rng a = make_stream(3, 1), b = make_stream(3, 1);
  CHECK(set.sample(a) == set.sample(b));
}

TEST_CASE("K=2 sampled ranks follow the ordered marginals") {
  const OrderedChannelSet set(2, kModerate);
  Rng rng = make_stream(78, 0);
  const int n = 20000;
  std::vector<double> strong(n), weak(n), brute_max(n);
  for (int t = 0; t < n; ++t) {
    const auto h = set.sample(rng);
    strong[t] = h[0];
    weak[t] = h[1];
  }
  // Brute force: larger of two independent draws, squared.
  for (int t = 0; t < n; ++t) {
    const double a = kModerate.sample_intensity(rng);
    const double b = kModerate.sample_intensity(rng);
    brute_max[t] = std::max(a, b) * std::max(a, b);
  }
  CHECK(stats::ks_test(strong, [&](double y) { return set.marginal_cdf(1, y); }).p_value > 0.01);
  CHECK(stats::ks_test(weak, [&](double y) { return set.marginal_cdf(2, y); }).p_value > 0.01);
  CHECK(stats::ks_test(brute_max, [&](double y) { return set.marginal_cdf(1, y); }).p_value >
        0.01);
}

TEST_CASE("K=2 straddle probability at the median") {
  const OrderedChannelSet set(2, kModerate);
  // Median of h by bisection on the CDF.
  double lo = 0.0, hi = 10.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (kModerate.h_cdf(mid) < 0.5 ? lo : hi) = mid;
  }
  const double t = 0.5 * (lo + hi);
  const double f = kModerate.h_cdf(t);
  const double p = 2.0 * f * (1.0 - f);
  Rng rng = make_stream(4, 0);
  const int n = 100000;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    const auto h = set.sample(rng);
    hits += (h[0] >= t && t >= h[1]);
  }
  const double est = static_cast<double>(hits) / n;
  CHECK(std::abs(est - p) < 3.0 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("descending order breaks ties by index") {
  const double v[] = {1.0, 3.0, 3.0, 2.0};
  CHECK(descending_order(v) == std::vector<int>{1, 2, 3, 0});
  const double w[] = {2.0, 1.0};
  CHECK(descending_order(w) == std::vector<int>{0, 1});
  CHECK(binomial(5, 2) == 10.0);
  CHECK(binomial(3, 4) == 0.0);
}
