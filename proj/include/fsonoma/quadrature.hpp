#pragma once

// Globally adaptive Gauss-Kronrod (G10/K21) integration.
//
// The interval with the largest error estimate is bisected until
//   error <= max(abs_tol, rel_tol * |value|).
// Semi-infinite ranges [a, inf) are mapped onto [0, 1) by x = a + t / (1 - t),
// dx = dt / (1 - t)^2; the Kronrod rule never samples t = 1.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fsonoma/errors.hpp"

namespace fsonoma::quad {

struct Options {
  double abs_tol = 1e-9;
  double rel_tol = 1e-8;
  int max_intervals = 4000;
  /// Throw NumericError when the tolerance is not met; otherwise return the
  /// best estimate with its error.
  bool throw_on_failure = true;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  bool converged = true;
};

namespace detail {

struct Segment {
  double a;
  double b;
  double value;
  double error;
};

struct Rule {
  std::vector<double> nodes;    // K21 abscissae in [0, 1], nodes[0] == 0
  std::vector<double> kronrod;  // K21 weights
  std::vector<double> gauss;    // G10 weights at odd node indices, 0 elsewhere
};

inline const Rule& gk21() {
  static const Rule rule = [] {
    using boost::math::quadrature::gauss;
    using boost::math::quadrature::gauss_kronrod;
    Rule r;
    const auto& x = gauss_kronrod<double, 21>::abscissa();
    const auto& wk = gauss_kronrod<double, 21>::weights();
    const auto& wg = gauss<double, 10>::weights();
    r.nodes.assign(x.begin(), x.end());
    r.kronrod.assign(wk.begin(), wk.end());
    r.gauss.assign(r.nodes.size(), 0.0);
    for (std::size_t j = 0; j < wg.size(); ++j) r.gauss[2 * j + 1] = wg[j];
    return r;
  }();
  return rule;
}

template <class F>
Segment apply_rule(F& f, double a, double b) {
  const Rule& r = gk21();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, 21> fv{};
  fv[0] = f(center);
  for (std::size_t i = 1; i < r.nodes.size(); ++i) {
    const double dx = half * r.nodes[i];
    fv[2 * i - 1] = f(center - dx);
    fv[2 * i] = f(center + dx);
  }
  double kron = r.kronrod[0] * fv[0];
  double gaus = r.gauss[0] * fv[0];
  double kabs = r.kronrod[0] * std::abs(fv[0]);
  for (std::size_t i = 1; i < r.nodes.size(); ++i) {
    kron += r.kronrod[i] * (fv[2 * i - 1] + fv[2 * i]);
    gaus += r.gauss[i] * (fv[2 * i - 1] + fv[2 * i]);
    kabs += r.kronrod[i] * (std::abs(fv[2 * i - 1]) + std::abs(fv[2 * i]));
  }
  const double mean = 0.5 * kron;
  double kasc = r.kronrod[0] * std::abs(fv[0] - mean);
  for (std::size_t i = 1; i < r.nodes.size(); ++i) {
    kasc += r.kronrod[i] * (std::abs(fv[2 * i - 1] - mean) + std::abs(fv[2 * i] - mean));
  }
  kron *= half;
  gaus *= half;
  kabs *= std::abs(half);
  kasc *= std::abs(half);

  // QUADPACK qk21 error scaling.
  constexpr double kEpmach = std::numeric_limits<double>::epsilon();
  constexpr double kUflow = std::numeric_limits<double>::min();
  double err = std::abs(kron - gaus);
  if (kasc != 0.0 && err != 0.0) err = kasc * std::min(1.0, std::pow(200.0 * err / kasc, 1.5));
  if (kabs > kUflow / (50.0 * kEpmach)) err = std::max(50.0 * kEpmach * kabs, err);
  if (!std::isfinite(kron)) err = std::numeric_limits<double>::infinity();
  return {a, b, kron, err};
}

inline bool by_error(const Segment& x, const Segment& y) { return x.error < y.error; }

}  // namespace detail

/// Integrates f over the finite interval [a, b].
template <class F>
Result integrate(F&& f, double a, double b, const Options& opt = {}) {
  Result res;
  if (a == b) return res;
  double sign = 1.0;
  if (b < a) {
    std::swap(a, b);
    sign = -1.0;
  }
  std::vector<detail::Segment> heap;
  heap.reserve(64);
  heap.push_back(detail::apply_rule(f, a, b));
  res.evaluations = 21;
  double value = heap.front().value;
  double error = heap.front().error;

  while (error > std::max(opt.abs_tol, opt.rel_tol * std::abs(value))) {
    if (static_cast<int>(heap.size()) >= opt.max_intervals) break;
    std::pop_heap(heap.begin(), heap.end(), detail::by_error);
    const detail::Segment worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end(), detail::by_error);
      break;
    }
    const detail::Segment left = detail::apply_rule(f, worst.a, mid);
    const detail::Segment right = detail::apply_rule(f, mid, worst.b);
    res.evaluations += 42;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), detail::by_error);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), detail::by_error);

    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
  }

  // Re-sum in interval order so the result does not depend on heap history.
  std::sort(heap.begin(), heap.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
  value = 0.0;
  error = 0.0;
  for (const auto& s : heap) {
    value += s.value;
    error += s.error;
  }

  res.value = sign * value;
  res.error = error;
  res.converged = error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(value));
  if (!res.converged && opt.throw_on_failure) {
    std::ostringstream msg;
    msg << "quadrature on [" << a << ", " << b << "] did not converge: estimated error " << error;
    throw NumericError(msg.str(), error);
  }
  return res;
}

/// Integrates f over [a, inf).
template <class F>
Result integrate_to_infinity(F&& f, double a, const Options& opt = {}) {
  auto mapped = [&f, a](double t) {
    const double s = 1.0 - t;
    const double x = a + t / s;
    if (!std::isfinite(x)) return 0.0;
    const double v = f(x);
    return v == 0.0 ? 0.0 : v / (s * s);
  };
  return integrate(mapped, 0.0, 1.0, opt);
}

}  // namespace fsonoma::quad
