// fsonoma: outage and sum-rate sweeps for NOMA over gamma-gamma FSO links.
//
// exit codes: 0 ok, 1 validation failure, 2 config error, 3 numeric failure

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "fsonoma/config.hpp"
#include "fsonoma/errors.hpp"
#include "fsonoma/experiments.hpp"
#include "fsonoma/validation.hpp"

namespace {

enum Exit { kOk = 0, kValidation = 1, kConfig = 2, kNumeric = 3 };

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trials;
  std::string out;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
};

// Writes the whole CSV at once so a failed run leaves no partial file.
void emit(const std::string& csv, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << csv << std::flush;
    return;
  }
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << csv;
  if (!f) throw std::runtime_error("write failed: " + path);
}

int run_sweep(const std::string& command, const std::string& config_path, const Globals& g) {
  const auto start = std::chrono::steady_clock::now();
  const fsonoma::ExperimentConfig cfg = fsonoma::load_config(config_path);
  fsonoma::RunOptions opt;
  opt.seed = g.seed;
  opt.trials = g.trials;
  opt.threads = g.threads;
  std::ostringstream csv;
  std::size_t rows = 0;
  if (command == "outage") {
    const auto r = fsonoma::outage_sweep(cfg, opt);
    fsonoma::write_outage_csv(r, csv);
    rows = r.size();
  } else {
    const auto r = fsonoma::sumrate_sweep(cfg, opt);
    fsonoma::write_sumrate_csv(r, csv);
    rows = r.size();
  }
  const std::string path = g.out.empty() ? cfg.output : g.out;
  emit(csv.str(), path);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::fprintf(stderr, "%s: %zu rows -> %s (%.1f s)\n", cfg.scenario.c_str(), rows,
               path.empty() || path == "-" ? "stdout" : path.c_str(), secs);
  return kOk;
}

int run_validate(bool quick, const std::string& fixtures, const Globals& g) {
  fsonoma::ValidationOptions opt;
  opt.quick = quick;
  opt.fixture_dir = fixtures;
  if (g.seed) opt.seed = *g.seed;
  const auto results = fsonoma::run_validation(opt);
  int failed = 0;
  for (const auto& r : results) {
    std::printf("%-22s %s  %6.2f s  %s\n", r.name.c_str(), r.passed ? "PASS" : "FAIL", r.seconds,
                r.detail.c_str());
    failed += !r.passed;
  }
  if (failed > 0) {
    std::printf("%d of %zu checks failed:\n", failed, results.size());
    for (const auto& r : results) {
      if (!r.passed) std::printf("  %s: %s\n", r.name.c_str(), r.detail.c_str());
    }
    return kValidation;
  }
  std::printf("all %zu checks passed\n", results.size());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NOMA over gamma-gamma FSO links: outage and ergodic sum-rate sweeps"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Master seed for Monte Carlo (overrides the config)");
  app.add_option("--trials", g.trials, "Monte Carlo trials per point, 0 disables (overrides the config)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--out", g.out, "Output CSV path, '-' for stdout (overrides the config)");
  app.add_option("--threads", g.threads, "Worker threads; results do not depend on this")
      ->check(CLI::PositiveNumber);

  std::string config_path;
  auto* outage = app.add_subcommand("outage", "Per-user outage: theory and Monte Carlo");
  outage->add_option("config", config_path, "Experiment config (JSON)")->required();
  auto* sumrate = app.add_subcommand("sumrate", "Ergodic sum rate of NOMA and OMA");
  sumrate->add_option("config", config_path, "Experiment config (JSON)")->required();

  bool quick = false;
  std::string fixtures;
  auto* validate = app.add_subcommand("validate", "Run the self-check suite");
  validate->add_flag("--quick", quick, "Smaller samples");
  validate->add_option("--fixtures", fixtures, "Directory with the reference fixture files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (validate->parsed()) return run_validate(quick, fixtures, g);
    return run_sweep(outage->parsed() ? "outage" : "sumrate", config_path, g);
  } catch (const fsonoma::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const fsonoma::DomainError& e) {
    std::fprintf(stderr, "config error: %s: %s\n", config_path.c_str(), e.what());
    return kConfig;
  } catch (const fsonoma::NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s (achieved error %g)\n", e.what(),
                 e.achieved_error());
    return kNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNumeric;
  }
}
