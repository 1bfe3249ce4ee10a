// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Run from ctest or directly; `-v` prints the per-point tables.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fsonoma/analysis.hpp"
#include "fsonoma/channel_model.hpp"
#include "fsonoma/config.hpp"
#include "fsonoma/experiments.hpp"
#include "fsonoma/monte_carlo.hpp"
#include "fsonoma/noma_link.hpp"
#include "fsonoma/order_statistics.hpp"
#include "fsonoma/stats.hpp"
#include "test_support.hpp"

#ifndef FSONOMA_SCENARIO_DIR
#error "FSONOMA_SCENARIO_DIR must be defined"
#endif

using namespace fsonoma;

namespace {

bool verbose = false;

const AtmosphericConfig kClear{16.0, 1550.0};
constexpr double kRytov[] = {0.1, 1.0};
constexpr double kZeta[] = {2.0, 3.0, 5.0};
constexpr double kRhoGrid[] = {10.0, 20.0, 30.0, 40.0};

double from_db(double db) { return std::pow(10.0, db / 10.0); }

SystemConfig two_user_link(double zeta_db, double rho_db, double r1 = 0.5, double r2 = 0.5) {
  return make_system({{1.0, r1, 0.5}, {3.0, r2, 0.5}}, kClear, zeta_db, from_db(rho_db));
}

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

// 1. Distribution correctness.
Outcome distribution_correctness() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  for (double rytov : kRytov) {
    const GammaGammaDist dist(TurbulenceSpec::from_rytov(rytov));
    const double top = testing::reference_support(dist.alpha(), dist.beta());
    // fixed composite rule, independent of the library's adaptive quadrature
    const double mass = testing::CompositeRule::integrate(
        [&](double i) { return i > 0 ? dist.intensity_pdf(i) : 0.0; }, 0.0, top, 400);
    o.require(std::abs(mass - 1.0) <= 1e-6, "rytov " + fmt("%g", rytov) + " mass " +
                                                fmt("%.12f", mass));
    o.note("rytov " + fmt("%g", rytov) + " |mass-1| " + fmt("%.1e", std::abs(mass - 1.0)));
  }
  double worst = 0.0;
  const auto rows = testing::read_csv(testing::data_path("h_cdf_fixtures.csv"));
  o.require(rows.size() == 20, "expected 20 fixtures");
  for (const auto& r : rows) {
    const GammaGammaDist dist(TurbulenceSpec{r[0], r[1], r[2]});
    const double err = std::abs(dist.h_cdf(r[3]) - r[4]);
    worst = std::max(worst, err);
    o.require(err <= 1e-6, "F(" + fmt("%g", r[3]) + ") off by " + fmt("%.2e", err));
  }
  const double secs = seconds_since(start);
  o.require(secs < 10.0, "runtime " + fmt("%.1f s", secs));
  o.note("20 cdf fixtures, max error " + fmt("%.1e", worst));
  return o;
}

// 2. Sampler fidelity.
Outcome sampler_fidelity() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = 1000000;
  for (double rytov : kRytov) {
    const GammaGammaDist dist(TurbulenceSpec::from_rytov(rytov));
    const IntensityMassTable table(dist);
    Rng rng = make_stream(2002, static_cast<std::uint64_t>(rytov * 10));
    std::vector<double> xs(n);
    for (auto& x : xs) x = dist.sample_intensity(rng);
    const auto mv = stats::mean_variance(xs);
    double m4 = 0.0;
    for (double x : xs) m4 += std::pow(x - mv.mean, 4);
    m4 /= static_cast<double>(n);
    const double se_mean = std::sqrt(mv.variance / n);
    const double se_var = std::sqrt((m4 - mv.variance * mv.variance) / n);
    const double var = 1.0 / dist.alpha() + 1.0 / dist.beta() + 1.0 / (dist.alpha() * dist.beta());
    const double zm = (mv.mean - 1.0) / se_mean;
    const double zv = (mv.variance - var) / se_var;
    o.require(std::abs(zm) <= 3.0, "rytov " + fmt("%g", rytov) + " mean z " + fmt("%.2f", zm));
    o.require(std::abs(zv) <= 3.0, "rytov " + fmt("%g", rytov) + " variance z " + fmt("%.2f", zv));
    const auto ks = stats::ks_test(std::move(xs), [&](double x) { return table.cdf(x); });
    o.require(ks.p_value >= 0.01, "rytov " + fmt("%g", rytov) + " KS p " + fmt("%.4f", ks.p_value));
    o.note("rytov " + fmt("%g", rytov) + ": z_mean " + fmt("%.2f", zm) + ", z_var " +
           fmt("%.2f", zv) + ", KS p " + fmt("%.3f", ks.p_value));
  }
  const double secs = seconds_since(start);
  o.require(secs < 30.0, "runtime " + fmt("%.1f s", secs));
  return o;
}

// 3. Order statistics.
Outcome order_statistics() {
  Outcome o;
  const int n = 100000;
  for (double rytov : kRytov) {
    const GammaGammaDist dist(TurbulenceSpec::from_rytov(rytov));
    const OrderedChannelSet set(2, dist);
    Rng rng = make_stream(3003, static_cast<std::uint64_t>(rytov * 10));
    std::vector<double> first(n), second(n);
    for (int i = 0; i < n; ++i) {
      const auto h = set.sample(rng);
      first[i] = h[0];
      second[i] = h[1];
    }
    for (int rank = 1; rank <= 2; ++rank) {
      const auto ks = stats::ks_test(rank == 1 ? first : second,
                                     [&](double y) { return set.marginal_cdf(rank, y); });
      o.require(ks.p_value >= 0.01, "rytov " + fmt("%g", rytov) + " rank " +
                                        std::to_string(rank) + " KS p " + fmt("%.4f", ks.p_value));
      o.note("rytov " + fmt("%g", rytov) + " rank " + std::to_string(rank) + " KS p " +
             fmt("%.3f", ks.p_value));
    }
    double worst = 0.0;
    for (int j = 0; j < 50; ++j) {
      const double h = std::exp(std::log(1e-3) + j * (std::log(20.0) - std::log(1e-3)) / 49.0);
      const double sum = set.marginal_pdf(1, h) + set.marginal_pdf(2, h);
      const double two_f = 2.0 * dist.h_pdf(h);
      const double rel = std::abs(sum - two_f) / two_f;
      worst = std::max(worst, rel);
    }
    o.require(worst <= 1e-10, "decomposition identity off by " + fmt("%.2e", worst));
    o.note("identity max rel " + fmt("%.1e", worst));
  }
  return o;
}

double c0_of(double rho_db, double zeta_db, int rank) {
  const double peak = 9.0 * (1.0 + 0.0015) * (1.0 + 0.0015);
  return from_db(rho_db) * 0.25 * std::pow(10.0, -2.0 * (rank - 1) * zeta_db / 10.0) / peak;
}

// 4. Formula-level outage oracle.
Outcome outage_oracle() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const double phi = std::exp(2.0 * (0.5 + 0.016)) - 1.0;
  double worst = 0.0;
  for (double rytov : kRytov) {
    const GammaGammaDist dist(TurbulenceSpec::from_rytov(rytov));
    const OrderedChannelSet set(2, dist);
    const testing::PairOracle oracle(dist.alpha(), dist.beta());
    for (double zeta : kZeta) {
      for (double rho_db : kRhoGrid) {
        const double s1 = c0_of(rho_db, zeta, 1), s2 = c0_of(rho_db, zeta, 2);
        const double want = oracle.rank1_success(phi / s1, phi * s2 / s1);
        const double got = success_prob_rank_k(two_user_link(zeta, rho_db), set, 1);
        const double err = std::abs(got - want);
        worst = std::max(worst, err);
        o.require(err <= 1e-4, "rytov " + fmt("%g", rytov) + " zeta " + fmt("%g", zeta) +
                                   " rho " + fmt("%g", rho_db) + " off by " + fmt("%.2e", err));
        if (verbose) {
          std::printf("  C4 rytov %-4g zeta %g rho %2g  analysis %.12f  oracle %.12f\n", rytov,
                      zeta, rho_db, got, want);
        }
      }
    }
  }
  const double secs = seconds_since(start);
  o.require(secs < 300.0, "runtime " + fmt("%.1f s", secs));
  o.note("24 points, max |diff| " + fmt("%.1e", worst) + ", " + fmt("%.1f s", secs));
  return o;
}

// 5. Theory against physical Monte Carlo.
Outcome theory_vs_mc() {
  Outcome o;
  double worst1 = 0.0, worst2 = 0.0;
  std::string where2;
  std::uint64_t point = 0;
  for (double rytov : kRytov) {
    const GammaGammaDist dist(TurbulenceSpec::from_rytov(rytov));
    const OrderedChannelSet set(2, dist);
    for (double zeta : kZeta) {
      for (double rho_db : kRhoGrid) {
        const auto cfg = two_user_link(zeta, rho_db);
        const auto theory = outage_per_user(cfg, set);
        const auto sim = mc::simulate_outage(cfg, dist, 100000, {point_seed(5005, point++), 10000, 1});
        const auto& m1 = sim.per_user[0];
        const auto& m2 = sim.per_user[1];
        const double d1 = std::abs(theory.per_user_outage[0] - m1.mean);
        const double d2 = theory.per_user_outage[1] - m2.mean;
        const std::string at = "rytov " + fmt("%g", rytov) + " zeta " + fmt("%g", zeta) +
                               " rho " + fmt("%g", rho_db);
        o.require(d1 <= std::max(0.01, 3.0 * m1.ci95_halfwidth()), "user 1 " + at);
        o.require(std::abs(d2) <= 0.05, "user 2 " + at + " gap " + fmt("%.4f", d2));
        worst1 = std::max(worst1, d1);
        if (std::abs(d2) > worst2) {
          worst2 = std::abs(d2);
          where2 = at;
        }
        // residual gap of the independence product, logged at every point
        std::printf("  C5 %s  P1 theory %.6f mc %.6f (se %.1e)  P2 theory %.6f mc %.6f gap %+.4f\n",
                    at.c_str(), theory.per_user_outage[0], m1.mean, m1.std_error,
                    theory.per_user_outage[1], m2.mean, d2);
      }
    }
  }
  o.note("user 1 max |diff| " + fmt("%.4f", worst1) + "; user 2 max |gap| " +
         fmt("%.4f", worst2) + " at " + where2);
  return o;
}

// 6. Back-off ordering at high SNR.
Outcome backoff_ordering() {
  Outcome o;
  const GammaGammaDist dist(TurbulenceSpec::from_rytov(0.1));
  const OrderedChannelSet set(2, dist);
  const auto z2 = outage_per_user(two_user_link(2.0, 40.0), set);
  const auto z5 = outage_per_user(two_user_link(5.0, 40.0), set);
  o.require(z5.per_user_outage[0] < z2.per_user_outage[0], "user 1 ordering");
  o.require(z5.per_user_outage[1] > z2.per_user_outage[1], "user 2 ordering");
  o.note("user 1: " + fmt("%.3e", z5.per_user_outage[0]) + " (5 dB) < " +
         fmt("%.3e", z2.per_user_outage[0]) + " (2 dB); user 2: " +
         fmt("%.3e", z5.per_user_outage[1]) + " (5 dB) > " + fmt("%.3e", z2.per_user_outage[1]) +
         " (2 dB)");
  return o;
}

// 7. Outage against target rate.
Outcome rate_ordering() {
  Outcome o;
  const double rates[] = {0.3, 0.5, 0.8};
  int checked = 0;
  for (double rytov : kRytov) {
    const GammaGammaDist dist(TurbulenceSpec::from_rytov(rytov));
    const OrderedChannelSet set(2, dist);
    for (double zeta : kZeta) {
      for (double rho_db = 0.0; rho_db <= 40.0; rho_db += 2.0) {
        std::vector<double> prev(2, -1.0);
        for (double rate : rates) {
          const auto res = outage_per_user(two_user_link(zeta, rho_db, rate, rate), set);
          for (int k = 0; k < 2; ++k) {
            o.require(res.per_user_outage[k] >= prev[k],
                      "rytov " + fmt("%g", rytov) + " zeta " + fmt("%g", zeta) + " rho " +
                          fmt("%g", rho_db) + " user " + std::to_string(k + 1) + " rate " +
                          fmt("%g", rate));
            prev[k] = res.per_user_outage[k];
            ++checked;
          }
        }
      }
    }
  }
  o.note(std::to_string(checked) + " outage values on 0-40 dB, non-decreasing in rate");
  return o;
}

struct SweepCache {
  std::map<std::string, std::string> csv;
  std::vector<SumRateRow> fig6;
  double seconds = 0.0;
};

std::string scenario_path(const std::string& name) {
  return std::string(FSONOMA_SCENARIO_DIR) + "/" + name + ".json";
}

std::string render(const ExperimentConfig& cfg, bool outage, int threads,
                   std::vector<SumRateRow>* sum_rows = nullptr) {
  RunOptions opt;
  opt.threads = threads;
  std::ostringstream out;
  if (outage) {
    write_outage_csv(outage_sweep(cfg, opt), out);
  } else {
    auto rows = sumrate_sweep(cfg, opt);
    write_sumrate_csv(rows, out);
    if (sum_rows) *sum_rows = std::move(rows);
  }
  return out.str();
}

const char* kFigures[][2] = {{"fig2", "outage"}, {"fig3", "outage"},  {"fig4", "outage"},
                             {"fig5", "outage"}, {"fig6", "sumrate"}, {"fig6_low_snr", "sumrate"}};

SweepCache& figure_sweep() {
  static SweepCache cache = [] {
    SweepCache c;
    const auto start = std::chrono::steady_clock::now();
    for (const auto& f : kFigures) {
      const auto cfg = load_config(scenario_path(f[0]));
      const bool outage = std::strcmp(f[1], "outage") == 0;
      c.csv[f[0]] = render(cfg, outage, 1, std::strcmp(f[0], "fig6") == 0 ? &c.fig6 : nullptr);
    }
    c.seconds = seconds_since(start);
    return c;
  }();
  return cache;
}

// 8. Ergodic sum rate, NOMA against OMA.
Outcome sum_rate_ordering() {
  Outcome o;
  const auto& rows = figure_sweep().fig6;
  // (rytov, rho) -> scheme -> mc row
  std::map<std::pair<double, double>, std::map<std::string, SumRateRow>> mc, quad;
  for (const auto& r : rows) {
    (r.method == "mc" ? mc : quad)[{r.rytov_var, r.rho_db}][r.scheme] = r;
  }
  o.require(!mc.empty(), "no Monte Carlo rows");
  for (double rytov : kRytov) {
    double gap10 = std::numeric_limits<double>::quiet_NaN(), gap40 = gap10;
    for (const auto& [key, by_scheme] : mc) {
      if (key.first != rytov) continue;
      const auto& n = by_scheme.at("noma");
      const auto& m = by_scheme.at("oma");
      const double se = std::hypot(*n.std_error, *m.std_error);
      o.require(n.sum_rate >= m.sum_rate - 3.0 * se,
                "rytov " + fmt("%g", rytov) + " rho " + fmt("%g", key.second) + ": NOMA " +
                    fmt("%.5f", n.sum_rate) + " < OMA " + fmt("%.5f", m.sum_rate));
      if (key.second == 10.0) gap10 = n.sum_rate - m.sum_rate;
      if (key.second == 40.0) gap40 = n.sum_rate - m.sum_rate;
      if (verbose) {
        const auto& qn = quad.at(key).at("noma");
        const auto& qm = quad.at(key).at("oma");
        std::printf("  C8 rytov %-4g rho %2g  NOMA mc %.5f quad %.5f  OMA mc %.5f quad %.5f\n",
                    rytov, key.second, n.sum_rate, qn.sum_rate, m.sum_rate, qm.sum_rate);
      }
    }
    o.require(gap10 < gap40, "rytov " + fmt("%g", rytov) + " gap at 10 dB not below 40 dB");
    o.note("rytov " + fmt("%g", rytov) + ": gap " + fmt("%.4f", gap10) + " at 10 dB, " +
           fmt("%.4f", gap40) + " at 40 dB");
  }
  o.note(std::to_string(mc.size()) + " points, 1e6 draws each");
  return o;
}

// 9. Telescoping identity against per-user rates from physical quantities.
Outcome telescoping() {
  Outcome o;
  std::mt19937_64 rng(9009);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  std::uniform_real_distribution<double> log_rho(std::log(1e1), std::log(1e6));
  double worst = 0.0;
  for (int n = 0; n < 10000; ++n) {
    const int K = 2 + n % 3;
    std::vector<UserLink> users;
    for (int k = 0; k < K; ++k) users.push_back({1.0 + k, 0.5, 0.5 - 0.1 * k});
    const double zeta = 1.0 + n % 5;
    const auto cfg = make_system(users, kClear, zeta, std::exp(log_rho(rng)));
    std::vector<double> intensity(K);
    for (auto& x : intensity) x = u(rng);
    const auto d = make_draw(cfg, intensity);
    const double A = 9.0 * std::pow(1.0 + cfg.constants.eps_mu, 2);
    const double sigma2 = 1.0 / cfg.rho;
    std::vector<double> received(K);
    for (int k = 0; k < K; ++k) {
      const int user = d.user_at_rank[k];
      const double a = 1.0 / (cfg.plan.path_loss[user] * std::pow(10.0, k * zeta / 10.0));
      const double amp = users[k].mu * d.gain[user] * a;
      received[k] = amp * amp;
    }
    double sum = 0.0;
    for (int k = 0; k < K; ++k) {
      double interference = 0.0;
      for (int i = k + 1; i < K; ++i) interference += received[i];
      sum += 0.5 * std::log(1.0 + received[k] / (interference + A * sigma2)) - cfg.constants.eps_phi;
    }
    const double closed = RateModel(cfg).telescoped_sum_rate(d.h);
    const double rel = std::abs(sum - closed) / std::abs(closed);
    worst = std::max(worst, rel);
    o.require(rel <= 1e-12, "draw " + std::to_string(n) + " rel " + fmt("%.2e", rel));
    if (!o.passed) break;
  }
  o.note("10000 draws, max rel " + fmt("%.1e", worst));
  return o;
}

// 10. Reproducibility and sweep runtime.
Outcome reproducibility() {
  Outcome o;
  auto& cache = figure_sweep();
  o.require(cache.seconds < 900.0, "figure sweep took " + fmt("%.0f s", cache.seconds));
  for (const auto& f : kFigures) {
    const auto cfg = load_config(scenario_path(f[0]));
    const std::string again = render(cfg, std::strcmp(f[1], "outage") == 0, 4);
    o.require(again == cache.csv.at(f[0]), std::string(f[0]) + " differs between 1 and 4 threads");
  }
  o.note("6 scenarios byte-identical at 1 and 4 threads; full sweep " +
         fmt("%.1f s", cache.seconds) + " at 1 thread");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) verbose |= std::strcmp(argv[i], "-v") == 0;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1 distribution correctness", distribution_correctness},
      {"2 sampler fidelity", sampler_fidelity},
      {"3 order statistics", order_statistics},
      {"4 formula-level outage oracle", outage_oracle},
      {"5 theory vs Monte Carlo", theory_vs_mc},
      {"6 back-off ordering at 40 dB", backoff_ordering},
      {"7 outage vs target rate", rate_ordering},
      {"8 NOMA vs OMA sum rate", sum_rate_ordering},
      {"9 telescoping identity", telescoping},
      {"10 reproducibility", reproducibility},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("threw: ") + e.what();
    }
    std::printf("%s criterion %-32s %6.1f s  %s\n", o.passed ? "PASS" : "FAIL", name,
                seconds_since(start), o.detail.c_str());
    std::fflush(stdout);
    failed += !o.passed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
