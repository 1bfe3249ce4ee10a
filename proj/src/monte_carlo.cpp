#include "fsonoma/monte_carlo.hpp"

#include <sstream>

#include "fsonoma/order_statistics.hpp"

namespace fsonoma::mc {

void Accumulator::merge(const Accumulator& o) {
  if (o.n == 0) return;
  if (n == 0) {
    *this = o;
    return;
  }
  const double total = static_cast<double>(n + o.n);
  const double delta = o.mean - mean;
  mean += delta * static_cast<double>(o.n) / total;
  m2 += o.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(o.n) / total;
  n += o.n;
}

Estimate Accumulator::estimate() const {
  Estimate e;
  e.n_trials = n;
  e.mean = mean;
  if (n > 1) e.std_error = std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
  return e;
}

namespace {

void check_trials(std::int64_t n_trials) {
  if (n_trials < kMinTrials) {
    std::ostringstream msg;
    msg << "Monte Carlo needs at least " << kMinTrials << " trials, got " << n_trials;
    throw DomainError(msg.str());
  }
}

// Draws K intensities and stores the squared values by decode rank.
void draw_ranked(const GammaGammaDist& dist, Rng& rng, std::vector<double>& intensity,
                 std::vector<double>& h) {
  for (auto& i : intensity) i = dist.sample_intensity(rng);
  const auto order = descending_order(intensity);
  for (std::size_t k = 0; k < order.size(); ++k) {
    h[k] = intensity[order[k]] * intensity[order[k]];
  }
}

struct OutageCounts {
  std::vector<std::int64_t> failures;
  std::int64_t covered = 0;
  std::int64_t n = 0;
};

Estimate proportion(std::int64_t hits, std::int64_t n) {
  Accumulator acc;
  acc.n = n;
  acc.mean = static_cast<double>(hits) / static_cast<double>(n);
  acc.m2 = acc.mean * (1.0 - acc.mean) * static_cast<double>(n);
  return acc.estimate();
}

}  // namespace

OutageEstimate simulate_outage(const SystemConfig& cfg, const GammaGammaDist& dist,
                               std::int64_t n_trials, const RngPolicy& policy) {
  check_trials(n_trials);
  cfg.validate();
  const int K = cfg.user_count();
  const RateModel model(cfg);
  std::vector<double> targets;
  for (const auto& u : cfg.users) targets.push_back(u.target_rate);

  auto job = [&](std::int64_t, std::int64_t, std::int64_t count, Rng& rng) {
    OutageCounts c;
    c.failures.assign(K, 0);
    c.n = count;
    std::vector<double> intensity(K), h(K), rates(K);
    for (std::int64_t t = 0; t < count; ++t) {
      draw_ranked(dist, rng, intensity, h);
      model.sic_rates(h, rates, Clamp::On);
      bool failed = false;
      for (int k = 0; k < K; ++k) {
        failed = failed || rates[k] < targets[k];
        c.failures[k] += failed;
      }
      c.covered += !failed;
    }
    return c;
  };
  OutageCounts init;
  init.failures.assign(K, 0);
  const OutageCounts total = run_chunked(n_trials, policy, job, init,
                                         [](OutageCounts& acc, const OutageCounts& c) {
                                           for (std::size_t k = 0; k < acc.failures.size(); ++k) {
                                             acc.failures[k] += c.failures[k];
                                           }
                                           acc.covered += c.covered;
                                           acc.n += c.n;
                                         });
  OutageEstimate out;
  for (int k = 0; k < K; ++k) out.per_user.push_back(proportion(total.failures[k], total.n));
  out.coverage = proportion(total.covered, total.n);
  return out;
}

Estimate simulate_sum_rate(const SystemConfig& cfg, const GammaGammaDist& dist, Scheme scheme,
                           std::int64_t n_trials, const RngPolicy& policy, SumRateForm form) {
  check_trials(n_trials);
  cfg.validate();
  const int K = cfg.user_count();
  const RateModel model(cfg);

  auto job = [&](std::int64_t, std::int64_t, std::int64_t count, Rng& rng) {
    Accumulator acc;
    std::vector<double> intensity(K), h(K), rates(K);
    for (std::int64_t t = 0; t < count; ++t) {
      draw_ranked(dist, rng, intensity, h);
      double value = 0.0;
      if (scheme == Scheme::Oma) {
        model.oma_rates(h, rates);
        for (double r : rates) value += r;
      } else if (form == SumRateForm::Telescoped) {
        value = model.telescoped_sum_rate(h);
      } else {
        model.sic_rates(h, rates, Clamp::On);
        for (double r : rates) value += r;
      }
      acc.add(value);
    }
    return acc;
  };
  const Accumulator total = run_chunked(n_trials, policy, job, Accumulator{},
                                        [](Accumulator& a, const Accumulator& b) { a.merge(b); });
  return total.estimate();
}

}  // namespace fsonoma::mc
