#include <array>
#include <cmath>
#include <limits>

#include "dwlab/lab.hpp"

namespace dwlab {

namespace {

double stat_variance(const Summary& s, Statistic st) {
  switch (st) {
    case Statistic::Theta:
      return s.sigma2_theta;
    case Statistic::Rho:
      return s.sigma2_rho;
    case Statistic::Dw:
      return s.sigma2_d;
  }
  return 0.0;
}

double stat_rate(const Summary& s, Statistic st, double x) {
  switch (st) {
    case Statistic::Theta:
      return rate_theta(x, s);
    case Statistic::Rho:
      return rate_rho(x, s);
    case Statistic::Dw:
      return rate_dw(x, s);
  }
  return 0.0;
}

int slot(Statistic st) { return static_cast<int>(st); }

}  // namespace

DeviationResult run_deviation_suite(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const auto s = summary(cfg.params);
  const auto reps = cfg.replications;
  DeviationResult result;
  result.checks_applied = cfg.noise.satisfies_cl();

  const bool want_mapping =
      std::find(cfg.statistics.begin(), cfg.statistics.end(), Statistic::Rho) != cfg.statistics.end() &&
      std::find(cfg.statistics.begin(), cfg.statistics.end(), Statistic::Dw) != cfg.statistics.end();

  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    const std::size_t n = cfg.n_grid[i];
    const double b_n = bn_sequence(static_cast<double>(n), cfg.alpha);
    const double scale = std::sqrt(static_cast<double>(n)) / b_n;
    const auto u = run_replications(reps, cfg.workers, [&](std::size_t rep) {
      CounterRng rng(replication_stream(cfg.master_seed, i, rep));
      const auto r = simulate_replication(cfg, n, rng);
      return std::array<double, 3>{scale * (r.ledger.theta_hat - s.theta_star), scale * (r.ledger.rho_hat - s.rho_star),
                                   scale * (r.ledger.dw - s.d_star)};
    });

    auto count_beyond = [&](int j, double x, double factor) {
      std::size_t k = 0;
      for (const auto& row : u)
        if (std::abs(factor * row[j]) > x) ++k;
      return k;
    };

    for (Statistic st : cfg.statistics) {
      const double sd = std::sqrt(stat_variance(s, st));
      std::vector<double> xs = cfg.thresholds;
      if (xs.empty()) xs.push_back(cfg.z * sd / b_n);
      for (double x : xs) {
        DeviationEstimate e;
        e.statistic = st;
        e.n = n;
        e.b_n = b_n;
        e.x = x;
        e.replications = reps;
        e.exceedances = count_beyond(slot(st), x, 1.0);
        e.p_hat = static_cast<double>(e.exceedances) / static_cast<double>(reps);
        std::tie(e.ci_low, e.ci_high) = clopper_pearson(e.exceedances, reps);
        const double b2 = b_n * b_n;
        e.r_n = e.exceedances == 0 ? std::numeric_limits<double>::infinity() : -std::log(e.p_hat / 2.0) / b2;
        e.r_n_se = e.exceedances == 0 ? std::numeric_limits<double>::infinity()
                                      : std::sqrt((1.0 - e.p_hat) / static_cast<double>(e.exceedances)) / b2;
        e.rate_target = stat_rate(s, st, x);
        e.gauss_oracle = neg_log_normal_tail(x * b_n / sd) / b2;
        e.insufficient_events = e.exceedances < kMinExceedances;
        result.estimates.push_back(e);
      }
    }

    if (want_mapping) {
      const double sd = std::sqrt(s.sigma2_d);
      std::vector<double> xs = cfg.thresholds;
      if (xs.empty()) xs.push_back(cfg.z * sd / b_n);
      for (double x : xs) {
        MappingCheck m;
        m.n = n;
        m.x = x;
        m.p_dw = static_cast<double>(count_beyond(slot(Statistic::Dw), x, 1.0)) / static_cast<double>(reps);
        m.p_two_rho = static_cast<double>(count_beyond(slot(Statistic::Rho), x, 2.0)) / static_cast<double>(reps);
        const double pbar = 0.5 * (m.p_dw + m.p_two_rho);
        m.binomial_se = std::sqrt(pbar * (1.0 - pbar) / static_cast<double>(reps));
        m.pass = std::abs(m.p_dw - m.p_two_rho) <= 2.0 * m.binomial_se;
        result.mapping_ok = result.mapping_ok && m.pass;
        result.mapping.push_back(m);
      }
    }
  }

  for (const auto& e : result.estimates) {
    const double ratio = e.ratio_gauss();
    if (!(ratio >= kGaussBandLow && ratio <= kGaussBandHigh)) result.band_ok = false;
  }

  // Monotone trend of r_n / I(x) along n for each (statistic, threshold slot). Successive
  // points may dip by at most twice the combined Monte Carlo standard error.
  const std::size_t per_n = result.estimates.size() / cfg.n_grid.size();
  for (std::size_t j = 0; j < per_n; ++j) {
    for (std::size_t i = 1; i < cfg.n_grid.size(); ++i) {
      const auto& prev = result.estimates[(i - 1) * per_n + j];
      const auto& cur = result.estimates[i * per_n + j];
      const double se = std::hypot(prev.r_n_se / prev.rate_target, cur.r_n_se / cur.rate_target);
      if (!(cur.ratio_rate() >= prev.ratio_rate() - 2.0 * se)) result.trend_ok = false;
    }
  }

  result.passed = result.checks_applied ? (result.band_ok && result.trend_ok && result.mapping_ok) : true;
  return result;
}

}  // namespace dwlab
