#include "fsonoma/order_statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fsonoma/errors.hpp"

namespace fsonoma {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

std::vector<int> descending_order(std::span<const double> values) {
  std::vector<int> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return values[a] > values[b]; });
  return idx;
}

OrderedChannelSet::OrderedChannelSet(int count, const GammaGammaDist& base)
    : count_(count), table_(std::make_shared<const IntensityMassTable>(base)) {
  if (count < 1) throw DomainError("ordered channel set needs at least one user");
}

double OrderedChannelSet::marginal_pdf(int rank, double h) const {
  if (rank < 1 || rank > count_) throw DomainError("rank out of range");
  const auto [cdf, sf] = table_->h_split(h);
  const int k = rank;
  const double coeff = count_ * binomial(count_ - 1, k - 1);
  return coeff * std::pow(cdf, count_ - k) * std::pow(sf, k - 1) * base().h_pdf(h);
}

double OrderedChannelSet::marginal_cdf(int rank, double y) const {
  if (rank < 1 || rank > count_) throw DomainError("rank out of range");
  if (y <= 0.0) return 0.0;
  const auto [cdf, sf] = table_->h_split(y);
  double total = 0.0;
  for (int j = 0; j < rank; ++j) {
    total += binomial(count_, j) * std::pow(sf, j) * std::pow(cdf, count_ - j);
  }
  return std::min(total, 1.0);
}

double OrderedChannelSet::joint_pdf(std::span<const double> values) const {
  if (static_cast<int>(values.size()) != count_) {
    throw DomainError("joint density needs exactly K values");
  }
  double density = std::tgamma(count_ + 1.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0)) return 0.0;
    if (i > 0 && values[i] > values[i - 1]) return 0.0;
    density *= base().h_pdf(values[i]);
  }
  return density;
}

std::vector<double> OrderedChannelSet::sample(Rng& rng) const {
  std::vector<double> h(count_);
  for (auto& v : h) {
    const double i = base().sample_intensity(rng);
    v = i * i;
  }
  std::vector<double> sorted(count_);
  const auto order = descending_order(h);
  for (int k = 0; k < count_; ++k) sorted[k] = h[order[k]];
  return sorted;
}

}  // namespace fsonoma
