#include "fsonoma/experiments.hpp"

#include <cmath>
#include <cstdio>

#include "fsonoma/analysis.hpp"
#include "fsonoma/errors.hpp"
#include "fsonoma/monte_carlo.hpp"
#include "fsonoma/order_statistics.hpp"
#include "fsonoma/rng.hpp"

namespace fsonoma {

namespace {

double from_db(double db) { return std::pow(10.0, db / 10.0); }

SystemConfig point_config(const ExperimentConfig& cfg, const std::vector<double>& rates,
                          double zeta_db, double rho_db) {
  auto users = cfg.users;
  for (std::size_t k = 0; k < users.size(); ++k) users[k].target_rate = rates[k];
  return make_system(users, cfg.atmosphere, zeta_db, from_db(rho_db), cfg.p_aim, cfg.constants);
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericError(std::string("non-finite ") + what, v);
}

struct Resolved {
  std::int64_t trials;
  mc::RngPolicy policy;
};

Resolved resolve(const ExperimentConfig& cfg, const RunOptions& opt) {
  Resolved r;
  r.trials = opt.trials.value_or(cfg.monte_carlo.trials);
  if (r.trials != 0 && r.trials < mc::kMinTrials) {
    throw DomainError("trials must be 0 or at least " + std::to_string(mc::kMinTrials));
  }
  r.policy.master_seed = opt.seed.value_or(cfg.monte_carlo.seed);
  r.policy.chunk_size = cfg.monte_carlo.chunk_size;
  r.policy.threads = std::max(1, opt.threads);
  return r;
}

std::string field(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

}  // namespace

std::uint64_t point_seed(std::uint64_t master_seed, std::uint64_t point) {
  return mix64(master_seed ^ mix64(point + 0x3c6ef372fe94f82bULL));
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::vector<OutageRow> outage_sweep(const ExperimentConfig& cfg, const RunOptions& opt) {
  const Resolved run = resolve(cfg, opt);
  const int K = static_cast<int>(cfg.users.size());
  std::vector<OutageRow> rows;
  std::uint64_t point = 0;
  for (double rytov : cfg.rytov_variances) {
    const GammaGammaDist dist(TurbulenceSpec::from_rytov(rytov));
    const OrderedChannelSet set(K, dist);
    for (const auto& rates : cfg.rate_sets()) {
      for (double zeta : cfg.zeta_db) {
        for (double rho_db : cfg.rho_db) {
          const SystemConfig sys = point_config(cfg, rates, zeta, rho_db);
          const OutageResult theory = outage_per_user(sys, set);
          std::optional<mc::OutageEstimate> sim;
          if (run.trials > 0) {
            mc::RngPolicy policy = run.policy;
            policy.master_seed = point_seed(run.policy.master_seed, point);
            sim = mc::simulate_outage(sys, dist, run.trials, policy);
          }
          ++point;
          for (int k = 0; k < K; ++k) {
            OutageRow row;
            row.rho_db = rho_db;
            row.user_rank = k + 1;
            row.zeta_db = zeta;
            row.rytov_var = rytov;
            row.target_rate = rates[k];
            row.outage_theory = theory.per_user_outage[k];
            require_finite(row.outage_theory, "outage");
            if (sim) {
              row.outage_mc = sim->per_user[k].mean;
              row.mc_stderr = sim->per_user[k].std_error;
              row.n_trials = sim->per_user[k].n_trials;
            }
            rows.push_back(row);
          }
        }
      }
    }
  }
  return rows;
}

std::vector<SumRateRow> sumrate_sweep(const ExperimentConfig& cfg, const RunOptions& opt) {
  const Resolved run = resolve(cfg, opt);
  const int K = static_cast<int>(cfg.users.size());
  const auto rates = cfg.rate_sets().front();
  std::vector<SumRateRow> rows;
  std::uint64_t point = 0;
  for (double rytov : cfg.rytov_variances) {
    const GammaGammaDist dist(TurbulenceSpec::from_rytov(rytov));
    const OrderedChannelSet set(K, dist);
    for (double zeta : cfg.zeta_db) {
      for (double rho_db : cfg.rho_db) {
        const SystemConfig sys = point_config(cfg, rates, zeta, rho_db);
        for (SchemeKind scheme : cfg.schemes) {
          const bool noma = scheme == SchemeKind::Noma;
          SumRateRow base;
          base.rho_db = rho_db;
          base.scheme = noma ? "noma" : "oma";
          base.rytov_var = rytov;
          base.zeta_db = zeta;
          if (!noma || K <= 2) {
            const ErgodicRate q =
                noma ? ergodic_sum_rate_noma(sys, set) : ergodic_sum_rate_oma(sys, set);
            SumRateRow row = base;
            row.sum_rate = q.value;
            row.method = "quadrature";
            require_finite(row.sum_rate, "sum rate");
            rows.push_back(row);
          }
          if (run.trials > 0) {
            mc::RngPolicy policy = run.policy;
            policy.master_seed = point_seed(run.policy.master_seed, point);
            const mc::Estimate e = mc::simulate_sum_rate(
                sys, dist, noma ? mc::Scheme::Noma : mc::Scheme::Oma, run.trials, policy);
            SumRateRow row = base;
            row.sum_rate = e.mean;
            row.std_error = e.std_error;
            row.method = "mc";
            require_finite(row.sum_rate, "sum rate");
            rows.push_back(row);
          }
          ++point;
        }
      }
    }
  }
  return rows;
}

void write_outage_csv(const std::vector<OutageRow>& rows, std::ostream& out) {
  out << "rho_dB,user_rank,zeta_dB,rytov_var,target_rate,outage_theory,outage_mc,mc_stderr,"
         "n_trials\n";
  for (const auto& r : rows) {
    out << format_number(r.rho_db) << ',' << r.user_rank << ',' << format_number(r.zeta_db)
        << ',' << format_number(r.rytov_var) << ',' << format_number(r.target_rate) << ','
        << format_number(r.outage_theory) << ',' << field(r.outage_mc) << ','
        << field(r.mc_stderr) << ',';
    if (r.n_trials > 0) out << r.n_trials;
    out << '\n';
  }
}

void write_sumrate_csv(const std::vector<SumRateRow>& rows, std::ostream& out) {
  out << "rho_dB,scheme,rytov_var,zeta_dB,sum_rate,stderr_or_blank,method\n";
  for (const auto& r : rows) {
    out << format_number(r.rho_db) << ',' << r.scheme << ',' << format_number(r.rytov_var) << ','
        << format_number(r.zeta_db) << ',' << format_number(r.sum_rate) << ','
        << field(r.std_error) << ',' << r.method << '\n';
  }
}

}  // namespace fsonoma
