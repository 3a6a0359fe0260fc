#include <cctype>
#include <cmath>
#include <string>

#include <boost/math/distributions/beta.hpp>
#include <boost/random/normal_distribution.hpp>

#include "dwlab/lab.hpp"

namespace dwlab {

std::string_view to_string(Suite s) {
  switch (s) {
    case Suite::Clt:
      return "clt";
    case Suite::Deviations:
      return "deviations";
    case Suite::Convergence:
      return "convergence";
    case Suite::Identities:
      return "identities";
    case Suite::Inequalities:
      return "inequalities";
  }
  return "unknown";
}

std::string_view to_string(Statistic s) {
  switch (s) {
    case Statistic::Theta:
      return "theta";
    case Statistic::Rho:
      return "rho";
    case Statistic::Dw:
      return "dw";
  }
  return "unknown";
}

Suite parse_suite(std::string_view name) {
  for (Suite s : {Suite::Clt, Suite::Deviations, Suite::Convergence, Suite::Identities, Suite::Inequalities})
    if (to_string(s) == name) return s;
  throw DomainError("unknown suite '" + std::string(name) +
                    "' (expected clt, deviations, convergence, identities or inequalities)");
}

Statistic parse_statistic(std::string_view name) {
  if (name == "theta") return Statistic::Theta;
  if (name == "rho") return Statistic::Rho;
  if (name == "dw" || name == "d") return Statistic::Dw;
  throw DomainError("unknown statistic '" + std::string(name) + "' (expected theta, rho or dw)");
}

void validate_config(const ExperimentConfig& cfg) {
  if (!cfg.random_params) validate_params(cfg.params);
  if (!(cfg.params.sigma2 > 0)) throw DomainError("sigma2 must be > 0");
  if (cfg.random_params && !(cfg.param_bound > 0 && cfg.param_bound < 1))
    throw DomainError("param_bound must lie in (0, 1)");
  if (cfg.random_params && (cfg.suite == Suite::Clt || cfg.suite == Suite::Deviations || cfg.suite == Suite::Convergence))
    throw DomainError("random parameters are only supported by the identities and inequalities suites");
  validate_noise(cfg.noise);
  if (cfg.n_grid.empty()) throw DomainError("n_grid must not be empty");
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    if (cfg.n_grid[i] < 2) throw DomainError("every n in n_grid must be >= 2");
    if (i > 0 && cfg.n_grid[i] <= cfg.n_grid[i - 1]) throw DomainError("n_grid must be strictly increasing");
  }
  if (cfg.replications < 100) throw DomainError("replications must be >= 100");
  if (cfg.workers < 1) throw DomainError("workers must be >= 1");
  if (cfg.suite == Suite::Deviations || cfg.suite == Suite::Convergence) (void)bn_sequence(2.0, cfg.alpha);
  if (cfg.suite == Suite::Deviations) {
    if (cfg.statistics.empty()) throw DomainError("deviation suite needs at least one statistic");
    for (double x : cfg.thresholds)
      if (!(x > 0)) throw DomainError("deviation thresholds must be > 0");
    if (cfg.thresholds.empty() && !(cfg.z > 0)) throw DomainError("z must be > 0");
  }
  if (cfg.suite == Suite::Convergence && !(cfg.delta > 0)) throw DomainError("delta must be > 0");
}

std::size_t burn_in_steps(const Params& p) {
  const double horizon = std::max(1.0 / (1.0 - std::abs(p.theta)), 1.0 / (1.0 - std::abs(p.rho)));
  return static_cast<std::size_t>(std::ceil(10.0 * horizon - 1e-9));
}

namespace {

// Parameters for one replication, drawn before any innovation so that paths with and
// without a stored trajectory consume the stream identically.
Params replication_params(const ExperimentConfig& cfg, CounterRng& rng) {
  Params p = cfg.params;
  if (cfg.random_params) {
    p.theta = cfg.param_bound * (2.0 * rng.uniform() - 1.0);
    p.rho = cfg.param_bound * (2.0 * rng.uniform() - 1.0);
  }
  if (cfg.random_params || cfg.random_init) {
    boost::random::normal_distribution<double> normal(0.0, std::sqrt(p.sigma2));
    p.x0 = normal(rng);
    p.eps0 = normal(rng);
  }
  return validate_params(p);
}

struct Stepper {
  Params p;
  NoiseSampler sampler;
  double x;
  double eps;

  Stepper(const Params& params, const NoiseSpec& noise)
      : p(params), sampler([&] {
          NoiseSpec s = noise;
          s.sigma2 = params.sigma2;
          return s;
        }()),
        x(params.x0), eps(params.eps0) {}

  double step(CounterRng& rng) {
    const double v = sampler(rng);
    eps = p.rho * eps + v;
    x = p.theta * x + eps;
    return v;
  }

  // Runs the burn-in and moves the measured origin to the end of it.
  Params start(const ExperimentConfig& cfg, CounterRng& rng) {
    if (cfg.burn_in) {
      const std::size_t burn = burn_in_steps(p);
      for (std::size_t i = 0; i < burn; ++i) step(rng);
    }
    Params measured = p;
    measured.x0 = x;
    measured.eps0 = eps;
    return measured;
  }
};

}  // namespace

Replication simulate_replication(const ExperimentConfig& cfg, std::size_t n, CounterRng& rng) {
  Stepper stepper(replication_params(cfg, rng), cfg.noise);
  const Params measured = stepper.start(cfg, rng);
  LedgerAccumulator acc(measured.x0, measured.eps0);
  for (std::size_t k = 0; k < n; ++k) {
    const double v = stepper.step(rng);
    acc.push(stepper.x, v);
  }
  return {measured, acc.finish(measured)};
}

std::pair<Params, Trajectory> simulate_replication_path(const ExperimentConfig& cfg, std::size_t n, CounterRng& rng) {
  Stepper stepper(replication_params(cfg, rng), cfg.noise);
  const Params measured = stepper.start(cfg, rng);
  std::vector<double> v(n);
  for (auto& vk : v) vk = stepper.step(rng);
  return {measured, propagate(measured, v)};
}

std::pair<double, double> clopper_pearson(std::size_t k, std::size_t n, double level) {
  using boost::math::beta_distribution;
  using boost::math::quantile;
  const double tail = (1.0 - level) / 2.0;
  const double kd = static_cast<double>(k);
  const double nd = static_cast<double>(n);
  const double low = k == 0 ? 0.0 : quantile(beta_distribution<double>(kd, nd - kd + 1.0), tail);
  const double high = k == n ? 1.0 : quantile(beta_distribution<double>(kd + 1.0, nd - kd), 1.0 - tail);
  return {low, high};
}

double neg_log_normal_tail(double z) {
  if (z < 25.0) return -std::log(0.5 * std::erfc(z / std::sqrt(2.0)));
  // Mills ratio expansion; erfc underflows further out.
  const double w = 1.0 / (z * z);
  const double series = 1.0 - w * (1.0 - 3.0 * w * (1.0 - 5.0 * w * (1.0 - 7.0 * w)));
  return 0.5 * z * z + std::log(z * std::sqrt(2.0 * M_PI)) - std::log(series);
}

void require_sufficient_events(const DeviationEstimate& e) {
  if (e.exceedances < kMinExceedances)
    throw InsufficientEventsError("only " + std::to_string(e.exceedances) + " exceedances for " +
                                  std::string(to_string(e.statistic)) + " at n=" + std::to_string(e.n));
}

}  // namespace dwlab
