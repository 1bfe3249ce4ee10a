#pragma once

// Chunked, reproducible Monte Carlo over physical channel draws.
//
// Trial t belongs to chunk t / chunk_size and every chunk draws from its
// own stream make_stream(master_seed, chunk). Chunk results are reduced in
// ascending chunk order, so the output is a pure function of
// (config, n_trials, master_seed, chunk_size) whatever the worker count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "fsonoma/channel_model.hpp"
#include "fsonoma/errors.hpp"
#include "fsonoma/noma_link.hpp"
#include "fsonoma/rng.hpp"

namespace fsonoma::mc {

struct RngPolicy {
  std::uint64_t master_seed = 1;
  std::int64_t chunk_size = 10000;
  int threads = 1;  // never changes results
};

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t n_trials = 0;

  double ci95_halfwidth() const { return 1.96 * std_error; }
};

/// Running sums for one scalar; merged in a fixed order.
struct Accumulator {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  void merge(const Accumulator& o);
  Estimate estimate() const;
};

constexpr std::int64_t kMinTrials = 1000;

/// Runs `job(chunk_index, first_trial, trial_count, rng)` for every chunk and
/// folds the returned values with `reduce(total, chunk_value)` in ascending
/// chunk order.
template <class Job, class Value, class Reduce>
Value run_chunked(std::int64_t n_trials, const RngPolicy& policy, Job&& job, Value init,
                  Reduce&& reduce) {
  if (policy.chunk_size < 1) throw DomainError("chunk size must be positive");
  const std::int64_t chunks = (n_trials + policy.chunk_size - 1) / policy.chunk_size;
  std::vector<Value> results(static_cast<std::size_t>(chunks), init);
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (std::int64_t c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) {
      const std::int64_t first = c * policy.chunk_size;
      const std::int64_t count = std::min(policy.chunk_size, n_trials - first);
      Rng rng = make_stream(policy.master_seed, static_cast<std::uint64_t>(c));
      results[static_cast<std::size_t>(c)] = job(c, first, count, rng);
    }
  };
  const int threads = std::max(1, std::min<int>(policy.threads, static_cast<int>(chunks)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  Value total = init;
  for (const Value& v : results) reduce(total, v);
  return total;
}

struct OutageEstimate {
  std::vector<Estimate> per_user;  // by decode rank
  Estimate coverage;               // all users decoded
};

/// Physical Monte Carlo of the SIC outage events. Each trial draws K
/// intensities, ranks them, and evaluates the exact rate condition; a
/// failed rank marks every later rank as failed in that trial.
OutageEstimate simulate_outage(const SystemConfig& cfg, const GammaGammaDist& dist,
                               std::int64_t n_trials, const RngPolicy& policy);

enum class Scheme { Noma, Oma };

/// Which per-draw sum rate simulate_sum_rate averages.
enum class SumRateForm {
  Telescoped,  // 1/2 log(1 + sum) - K eps_phi, unclamped (NOMA only)
  Clamped,     // sum of the clamped per-user rates
};

Estimate simulate_sum_rate(const SystemConfig& cfg, const GammaGammaDist& dist, Scheme scheme,
                           std::int64_t n_trials, const RngPolicy& policy,
                           SumRateForm form = SumRateForm::Telescoped);

}  // namespace fsonoma::mc
