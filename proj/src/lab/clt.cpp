#include <array>
#include <cmath>
#include <limits>

#include "dwlab/lab.hpp"

namespace dwlab {

namespace {

struct Moments {
  double mean = 0, var = 0, mean_se = 0, var_se = 0;
};

Moments moments(const std::vector<std::array<double, 3>>& z, int j) {
  const auto r = static_cast<double>(z.size());
  CompensatedSum s;
  for (const auto& row : z) s.add(row[j]);
  Moments m;
  m.mean = s.value() / r;
  CompensatedSum s2, s4;
  for (const auto& row : z) {
    const double d = row[j] - m.mean;
    s2.add(d * d);
    s4.add(d * d * d * d);
  }
  m.var = s2.value() / (r - 1.0);
  m.mean_se = std::sqrt(m.var / r);
  const double m4 = s4.value() / r;
  m.var_se = std::sqrt(std::max(0.0, m4 - m.var * m.var) / r);
  return m;
}

}  // namespace

CltResult run_clt_suite(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const auto s = summary(cfg.params);
  CltResult result;

  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    const std::size_t n = cfg.n_grid[i];
    const double root_n = std::sqrt(static_cast<double>(n));
    const auto z = run_replications(cfg.replications, cfg.workers, [&](std::size_t rep) {
      CounterRng rng(replication_stream(cfg.master_seed, i, rep));
      const auto r = simulate_replication(cfg, n, rng);
      return std::array<double, 3>{root_n * (r.ledger.theta_hat - s.theta_star),
                                   root_n * (r.ledger.rho_hat - s.rho_star), root_n * (r.ledger.dw - s.d_star)};
    });

    const Moments th = moments(z, 0);
    const Moments rh = moments(z, 1);
    const Moments dw = moments(z, 2);

    const auto reps = static_cast<double>(z.size());
    CompensatedSum cross;
    for (const auto& row : z) cross.add((row[0] - th.mean) * (row[1] - rh.mean));
    const double cov = cross.value() / (reps - 1.0);
    CompensatedSum cross_dev;
    for (const auto& row : z) {
      const double d = (row[0] - th.mean) * (row[1] - rh.mean) - cov;
      cross_dev.add(d * d);
    }
    const double cov_se = std::sqrt(cross_dev.value() / reps / reps);

    auto add = [&](std::string quantity, double est, double se, double target, std::string check, double tol) {
      CltRow row{n, std::move(quantity), est, se, target, std::move(check), tol, true};
      if (row.check == "rel")
        row.pass = std::abs(est / target - 1.0) <= tol;
      else if (row.check == "abs")
        row.pass = std::abs(est - target) <= tol;
      result.passed = result.passed && row.pass;
      result.rows.push_back(std::move(row));
    };

    add("mean_theta", th.mean, th.mean_se, 0.0, "report", 0.0);
    add("var_theta", th.var, th.var_se, s.sigma2_theta, "rel", 0.10);
    add("mean_rho", rh.mean, rh.mean_se, 0.0, "report", 0.0);
    add("var_rho", rh.var, rh.var_se, s.sigma2_rho, "rel", 0.10);
    add("mean_dw", dw.mean, dw.mean_se, 0.0, "report", 0.0);
    add("var_dw", dw.var, dw.var_se, s.sigma2_d, "rel", 0.10);
    add("cov_theta_rho", cov, cov_se, s.gamma(0, 1), "abs", 0.02);
    const double ratio = dw.var / rh.var;
    const double ratio_se = ratio * std::hypot(dw.var_se / dw.var, rh.var_se / rh.var);
    add("ratio_dw_rho", ratio, ratio_se, 4.0, "rel", 0.10);
  }
  return result;
}

}  // namespace dwlab
