#include <array>
#include <cmath>
#include <limits>

#include "dwlab/lab.hpp"

namespace dwlab {

namespace {

constexpr std::size_t kFunctionals = 12;
constexpr std::array<const char*, kFunctionals> kNames = {
    "S_n/n", "P_n/n", "Q_n/n", "J_n/n", "T_n", "f_n", "L_n/n", "M_n/n", "N_n/n", "theta_hat", "rho_hat", "dw"};

}  // namespace

ConvergenceResult run_convergence_suite(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const auto s = summary(cfg.params);
  const std::array<double, kFunctionals> targets = {
      s.ell, s.ell1, s.ell2, s.j_limit, s.t_limit, 0.0, cfg.params.sigma2, 0.0, 0.0, s.theta_star, s.rho_star, s.d_star};
  const auto reps = static_cast<double>(cfg.replications);

  ConvergenceResult result;
  std::array<double, kFunctionals> prev_freq{};
  std::array<double, kFunctionals> prev_se{};

  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    const std::size_t n = cfg.n_grid[i];
    const double nd = static_cast<double>(n);
    const double b_n = bn_sequence(nd, cfg.alpha);
    const auto values = run_replications(cfg.replications, cfg.workers, [&](std::size_t rep) {
      CounterRng rng(replication_stream(cfg.master_seed, i, rep));
      const auto& l = simulate_replication(cfg, n, rng).ledger;
      return std::array<double, kFunctionals>{l.S_n / nd, l.P_n / nd, l.Q_n / nd, l.J_n / nd, l.T_n, l.f_n,
                                              l.L_n / nd, l.M_n / nd, l.N_n / nd, l.theta_hat, l.rho_hat, l.dw};
    });

    for (std::size_t j = 0; j < kFunctionals; ++j) {
      CompensatedSum total;
      std::size_t beyond = 0;
      for (const auto& row : values) {
        total.add(row[j]);
        if (std::abs(row[j] - targets[j]) > cfg.delta) ++beyond;
      }
      ConvergenceRow row;
      row.n = n;
      row.functional = kNames[j];
      row.target = targets[j];
      row.delta = cfg.delta;
      row.mean = total.value() / reps;
      row.freq = static_cast<double>(beyond) / reps;
      row.freq_se = std::sqrt(row.freq * (1.0 - row.freq) / reps);
      row.decay = beyond == 0 ? std::numeric_limits<double>::infinity() : -std::log(row.freq) / (b_n * b_n);
      if (i > 0) {
        // Binomial noise floor: one event out of `reps` when both estimates are near zero.
        const double se = std::max(std::hypot(prev_se[j], row.freq_se), 1.0 / reps);
        row.monotone = row.freq <= prev_freq[j] + 2.0 * se;
      }
      prev_freq[j] = row.freq;
      prev_se[j] = row.freq_se;
      result.passed = result.passed && row.monotone;
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

}  // namespace dwlab
