#pragma once

#include <functional>
#include <span>
#include <vector>

namespace fsonoma::stats {

struct KsResult {
  double statistic;  // sup |F_n - F|
  double p_value;
};

/// One-sample Kolmogorov-Smirnov test. `samples` need not be sorted.
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Asymptotic P(D_n > d) with the Stephens small-sample correction.
double kolmogorov_sf(double d, std::size_t n);

struct MeanVar {
  double mean;
  double variance;  // unbiased
};

MeanVar mean_variance(std::span<const double> xs);

}  // namespace fsonoma::stats
