#pragma once

// Descending order statistics h_1 >= ... >= h_K of K i.i.d. squared
// intensities. Rank 1 is the strongest user, decoded first.

#include <memory>
#include <span>
#include <vector>

#include "fsonoma/channel_model.hpp"

namespace fsonoma {

class OrderedChannelSet {
 public:
  OrderedChannelSet(int count, const GammaGammaDist& base);

  int count() const { return count_; }
  const GammaGammaDist& base() const { return table_->dist(); }
  const IntensityMassTable& table() const { return *table_; }

  /// Density of the rank-k value:
  ///   K! / ((k-1)! (K-k)!) F(h)^(K-k) (1 - F(h))^(k-1) f(h).
  double marginal_pdf(int rank, double h) const;

  /// CDF of the rank-k value, P(h_(k) <= y) = P(at most k-1 of K exceed y).
  double marginal_cdf(int rank, double y) const;

  /// K! prod f(h_i) when values are positive and non-increasing, else 0.
  double joint_pdf(std::span<const double> values) const;

  /// One realization of the ordered vector, descending.
  std::vector<double> sample(Rng& rng) const;

 private:
  int count_;
  std::shared_ptr<const IntensityMassTable> table_;
};

/// Binomial coefficient n choose k as a double.
double binomial(int n, int k);

/// Indices that sort `values` descending; equal values keep ascending index.
std::vector<int> descending_order(std::span<const double> values);

}  // namespace fsonoma
