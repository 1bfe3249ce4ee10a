#include "fsonoma/validation.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "fsonoma/channel_model.hpp"
#include "fsonoma/noma_link.hpp"
#include "fsonoma/order_statistics.hpp"
#include "fsonoma/rng.hpp"
#include "fsonoma/special_functions.hpp"
#include "fsonoma/stats.hpp"

#ifndef FSONOMA_DATA_DIR
#define FSONOMA_DATA_DIR "data"
#endif

namespace fsonoma {

namespace {

constexpr double kRytov[] = {0.1, 1.0};
constexpr double kKsLevel = 0.01;

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

// Numeric CSV rows of a fixture; '#' lines and the header are skipped.
std::vector<std::vector<double>> read_fixture(const std::filesystem::path& path,
                                              std::size_t columns) {
  std::ifstream in(path);
  if (!in) throw Failure("fixture " + path.filename().string() + ": cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  bool header = true;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      double v = std::numeric_limits<double>::quiet_NaN();
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || !std::isfinite(v)) {
        throw Failure("fixture " + path.filename().string() + " line " + std::to_string(number) +
                      ": not a number '" + cell + "'");
      }
      row.push_back(v);
    }
    if (row.size() != columns) {
      throw Failure("fixture " + path.filename().string() + " line " + std::to_string(number) +
                    ": expected " + std::to_string(columns) + " columns");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Failure("fixture " + path.filename().string() + " has no rows");
  return rows;
}

std::string check_bessel(const std::filesystem::path& dir, bool) {
  const auto path = dir / "bessel_k_fixtures.csv";
  double worst = 0.0;
  for (const auto& r : read_fixture(path, 3)) {
    const double got = log_bessel_k(r[0], r[1]);
    const double err = std::abs(got - r[2]) / std::max(1.0, std::abs(r[2]));
    worst = std::max(worst, err);
    if (!(err <= 1e-12)) {
      throw Failure("fixture " + path.filename().string() + ": log K(" + fmt(r[0]) + ", " +
                    fmt(r[1]) + ") = " + fmt(got) + ", expected " + fmt(r[2]));
    }
  }
  return "max relative error " + fmt(worst);
}

std::string check_normalization(const std::filesystem::path&, bool) {
  std::string detail;
  for (double rytov : kRytov) {
    const GammaGammaDist dist(TurbulenceSpec::from_rytov(rytov));
    const double total =
        dist.integrate([](double) { return 1.0; }, 0.0, std::numeric_limits<double>::infinity(),
                       GammaGammaDist::cdf_options())
            .value;
    if (!(std::abs(total - 1.0) <= 1e-6)) {
      throw Failure("rytov " + fmt(rytov) + ": total mass " + fmt(total));
    }
    detail += "rytov " + fmt(rytov) + ": |mass-1| " + fmt(std::abs(total - 1.0)) + "; ";
  }
  return detail;
}

std::string check_cdf_fixtures(const std::filesystem::path& dir, bool) {
  const auto path = dir / "h_cdf_fixtures.csv";
  double worst = 0.0;
  int n = 0;
  for (const auto& r : read_fixture(path, 5)) {
    const GammaGammaDist dist(TurbulenceSpec{r[0], r[1], r[2]});
    const double got = dist.h_cdf(r[3]);
    const double err = std::abs(got - r[4]);
    worst = std::max(worst, err);
    if (!(err <= 1e-6)) {
      throw Failure("fixture " + path.filename().string() + ": F(" + fmt(r[3]) + ") at rytov " +
                    fmt(r[0]) + " = " + fmt(got) + ", expected " + fmt(r[4]));
    }
    ++n;
  }
  return std::to_string(n) + " values, max abs error " + fmt(worst);
}

std::string check_sampler(std::uint64_t seed, bool quick) {
  const std::int64_t n = quick ? 100000 : 1000000;
  std::string detail;
  for (double rytov : kRytov) {
    const GammaGammaDist dist(TurbulenceSpec::from_rytov(rytov));
    const IntensityMassTable table(dist);
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(rytov * 10));
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (auto& x : xs) x = dist.sample_intensity(rng);
    const auto mv = stats::mean_variance(xs);
    double m4 = 0.0;
    for (double x : xs) m4 += std::pow(x - mv.mean, 4);
    m4 /= static_cast<double>(n);
    const double se_mean = std::sqrt(mv.variance / n);
    const double se_var = std::sqrt((m4 - mv.variance * mv.variance) / n);
    const double var = dist.intensity_variance();
    if (!(std::abs(mv.mean - 1.0) <= 3.0 * se_mean)) {
      throw Failure("rytov " + fmt(rytov) + ": mean " + fmt(mv.mean) + " outside 3 stderr of 1");
    }
    if (!(std::abs(mv.variance - var) <= 3.0 * se_var)) {
      throw Failure("rytov " + fmt(rytov) + ": variance " + fmt(mv.variance) + ", expected " +
                    fmt(var));
    }
    const auto ks = stats::ks_test(std::move(xs), [&](double x) { return table.cdf(x); });
    if (!(ks.p_value >= kKsLevel)) {
      throw Failure("rytov " + fmt(rytov) + ": KS p-value " + fmt(ks.p_value));
    }
    detail += "rytov " + fmt(rytov) + ": KS p " + fmt(ks.p_value) + "; ";
  }
  return std::to_string(n) + " draws each; " + detail;
}

std::string check_order_statistics(std::uint64_t seed, bool quick) {
  const int n = quick ? 20000 : 100000;
  std::string detail;
  for (double rytov : kRytov) {
    const GammaGammaDist dist(TurbulenceSpec::from_rytov(rytov));
    const OrderedChannelSet set(2, dist);
    Rng rng = make_stream(seed ^ 0x0bd3, static_cast<std::uint64_t>(rytov * 10));
    std::vector<double> first(n), second(n);
    for (int i = 0; i < n; ++i) {
      const auto h = set.sample(rng);
      first[i] = h[0];
      second[i] = h[1];
    }
    for (int rank = 1; rank <= 2; ++rank) {
      auto& xs = rank == 1 ? first : second;
      const auto ks =
          stats::ks_test(std::move(xs), [&](double y) { return set.marginal_cdf(rank, y); });
      if (!(ks.p_value >= kKsLevel)) {
        throw Failure("rytov " + fmt(rytov) + " rank " + std::to_string(rank) + ": KS p-value " +
                      fmt(ks.p_value));
      }
      detail += "rytov " + fmt(rytov) + " rank " + std::to_string(rank) + ": p " +
                fmt(ks.p_value) + "; ";
    }
  }
  return detail;
}

std::string check_telescoping(std::uint64_t seed, bool) {
  Rng rng = make_stream(seed, 77);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  std::uniform_real_distribution<double> log_rho(std::log(1e1), std::log(1e6));
  const AtmosphericConfig atm;
  double worst = 0.0;
  for (int n = 0; n < 10000; ++n) {
    const int K = 2 + n % 3;
    std::vector<UserLink> users;
    for (int k = 0; k < K; ++k) users.push_back({1.0 + k, 0.5, 0.5});
    const SystemConfig cfg = make_system(users, atm, 1.0 + n % 5, std::exp(log_rho(rng)));
    const RateModel model(cfg);
    std::vector<double> intensity(K), rates(K);
    for (auto& x : intensity) x = u(rng);
    const auto d = make_draw(cfg, intensity);
    model.sic_rates(d.h, rates, Clamp::Off);
    double sum = 0.0;
    for (double r : rates) sum += r;
    const double closed = model.telescoped_sum_rate(d.h);
    const double err = std::abs(sum - closed) / std::abs(closed);
    worst = std::max(worst, err);
    if (!(err <= 1e-12)) throw Failure("draw " + std::to_string(n) + ": relative gap " + fmt(err));
  }
  return "10000 draws, max relative gap " + fmt(worst);
}

}  // namespace

std::filesystem::path default_fixture_dir() { return FSONOMA_DATA_DIR; }

std::vector<CheckResult> run_validation(const ValidationOptions& opt) {
  const auto dir = opt.fixture_dir.empty() ? default_fixture_dir() : opt.fixture_dir;
  const std::uint64_t seed = opt.seed;
  using Check = std::function<std::string()>;
  const std::vector<std::pair<std::string, Check>> checks = {
      {"bessel_k_fixtures", [&] { return check_bessel(dir, opt.quick); }},
      {"pdf_normalization", [&] { return check_normalization(dir, opt.quick); }},
      {"h_cdf_fixtures", [&] { return check_cdf_fixtures(dir, opt.quick); }},
      {"sampler_moments_ks", [&] { return check_sampler(seed, opt.quick); }},
      {"order_statistics_ks", [&] { return check_order_statistics(seed, opt.quick); }},
      {"telescoping_identity", [&] { return check_telescoping(seed, opt.quick); }},
  };
  std::vector<CheckResult> out;
  for (const auto& [name, run] : checks) {
    CheckResult r;
    r.name = name;
    const auto start = std::chrono::steady_clock::now();
    try {
      r.detail = run();
      while (!r.detail.empty() && (r.detail.back() == ' ' || r.detail.back() == ';')) {
        r.detail.pop_back();
      }
      r.passed = true;
    } catch (const std::exception& e) {
      r.detail = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace fsonoma
