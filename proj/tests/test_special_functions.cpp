#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/math/special_functions/bessel.hpp>

#include "fsonoma/errors.hpp"
#include "fsonoma/quadrature.hpp"
#include "fsonoma/special_functions.hpp"
#include "test_support.hpp"

using namespace fsonoma;

TEST_CASE("log_bessel_k matches 40-digit reference values") {
  const auto rows = testing::read_csv(testing::data_path("bessel_k_fixtures.csv"));
  REQUIRE(rows.size() == 48);
  for (const auto& r : rows) {
    const double nu = r[0], x = r[1], expected = r[2];
    CAPTURE(nu);
    CAPTURE(x);
    // Relative error of K equals absolute error of log K.
    CHECK(std::abs(log_bessel_k(nu, x) - expected) < 1e-12 * std::max(1.0, std::abs(expected)));
  }
}

TEST_CASE("bessel_k agrees with Boost over the working range") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> order(-25.0, 25.0);
  std::uniform_real_distribution<double> log_arg(std::log(1e-3), std::log(600.0));
  for (int n = 0; n < 2000; ++n) {
    const double nu = order(rng);
    const double x = std::exp(log_arg(rng));
    const double ref = boost::math::cyl_bessel_k(nu, x);
    if (!(ref > 1e-290 && ref < 1e290)) continue;
    CAPTURE(nu);
    CAPTURE(x);
    CHECK(std::abs(bessel_k(nu, x) / ref - 1.0) < 1e-10);
  }
}

TEST_CASE("bessel_k is continuous in the order through integers") {
  for (double x : {0.3, 1.5, 2.5, 20.0}) {
    for (double n : {0.0, 1.0, 3.0}) {
      const double at = bessel_k(n, x);
      CHECK(std::abs(bessel_k(n + 1e-9, x) / at - 1.0) < 1e-7);
      CHECK(std::abs(bessel_k(n - 1e-9, x) / at - 1.0) < 1e-7);
    }
  }
}

TEST_CASE("log_bessel_k stays finite where K under/overflows") {
  CHECK(std::isfinite(log_bessel_k(0.86, 5000.0)));
  CHECK(log_bessel_k(0.86, 5000.0) < -4999.0);
  CHECK(std::isfinite(log_bessel_k(150.0, 1e-3)));
  CHECK_THROWS_AS(log_bessel_k(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(log_bessel_k(1.0, -1.0), DomainError);
}

TEST_CASE("adaptive quadrature on finite and semi-infinite ranges") {
  const auto r = quad::integrate([](double x) { return std::sin(x); }, 0.0, M_PI);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
  const auto g = quad::integrate_to_infinity([](double x) { return std::exp(-x * x); }, 0.0);
  CHECK(g.value == doctest::Approx(std::sqrt(M_PI) / 2).epsilon(1e-10));
  // Integrable endpoint singularity.
  const auto s = quad::integrate([](double x) { return x > 0 ? 1.0 / std::sqrt(x) : 0.0; }, 0.0, 1.0);
  CHECK(s.value == doctest::Approx(2.0).epsilon(1e-7));
  const auto rev = quad::integrate([](double x) { return x; }, 1.0, 0.0);
  CHECK(rev.value == doctest::Approx(-0.5));
}

TEST_CASE("quadrature reports non-convergence") {
  quad::Options opt;
  opt.max_intervals = 3;
  opt.abs_tol = 1e-15;
  opt.rel_tol = 0.0;
  auto spiky = [](double x) { return std::abs(x - 0.3333) < 1e-6 ? 1e6 : std::sin(50 * x); };
  CHECK_THROWS_AS(quad::integrate(spiky, 0.0, 1.0, opt), NumericError);
  opt.throw_on_failure = false;
  const auto r = quad::integrate(spiky, 0.0, 1.0, opt);
  CHECK_FALSE(r.converged);
  CHECK(r.error > 0.0);
}
