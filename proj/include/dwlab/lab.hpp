#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "dwlab/asymptotics.hpp"
#include "dwlab/model.hpp"
#include "dwlab/noise.hpp"
#include "dwlab/statistics.hpp"

namespace dwlab {

enum class Suite { Clt, Deviations, Convergence, Identities, Inequalities };
enum class Statistic { Theta, Rho, Dw };

std::string_view to_string(Suite s);
std::string_view to_string(Statistic s);
Suite parse_suite(std::string_view name);
Statistic parse_statistic(std::string_view name);

struct ExperimentConfig {
  Params params{0.5, 0.3, 1.0, 0.0, 0.0};
  NoiseSpec noise{};
  std::vector<std::size_t> n_grid{1000};
  double alpha = 0.2;
  /// Explicit deviation thresholds x. When empty, one threshold per n with x b_n / sigma_stat = z.
  std::vector<double> thresholds{};
  double z = 2.5;
  std::vector<Statistic> statistics{Statistic::Theta, Statistic::Rho, Statistic::Dw};
  std::size_t replications = 1000;
  std::uint64_t master_seed = 42;
  std::size_t workers = 1;
  Suite suite = Suite::Identities;
  double delta = 0.2;
  /// Discard the first 10 max(1/(1-|theta|), 1/(1-|rho|)) steps before measuring.
  bool burn_in = false;
  /// Draw X_0 and eps_0 from N(0, sigma2) per replication instead of using params.x0/eps0.
  bool random_init = false;
  /// Draw (theta, rho) uniformly in (-param_bound, param_bound) per replication,
  /// plus random initial values. Used by the identity and inequality suites.
  bool random_params = false;
  double param_bound = 0.95;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Throws DomainError / StabilityError before any simulation starts.
void validate_config(const ExperimentConfig& cfg);

/// Number of steps discarded when burn-in is enabled.
std::size_t burn_in_steps(const Params& p);

/// Runs fn(i) for i in [0, count) on `workers` threads and returns the results in
/// index order, so any fold over the output is independent of scheduling.
template <typename Fn>
auto run_replications(std::size_t count, std::size_t workers, Fn&& fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using Result = decltype(fn(std::size_t{}));
  std::vector<Result> out(count);
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        try {
          for (std::size_t i = next++; i < count; i = next++) out[i] = fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

/// Substream of replication `rep` at grid point `point`.
inline Substream replication_stream(std::uint64_t master_seed, std::size_t point, std::size_t rep) {
  return {master_seed, (static_cast<std::uint64_t>(point) << 40) | static_cast<std::uint64_t>(rep)};
}

/// Parameters and ledger of one replication; the path itself is not kept.
struct Replication {
  Params params;
  StatLedger ledger;
};

/// Draws (optional) random parameters and initial values from `rng`, then simulates
/// n steps (after optional burn-in) while streaming them into a ledger.
Replication simulate_replication(const ExperimentConfig& cfg, std::size_t n, CounterRng& rng);

/// Same as simulate_replication but keeps the measured path.
std::pair<Params, Trajectory> simulate_replication_path(const ExperimentConfig& cfg, std::size_t n, CounterRng& rng);

// ---------------------------------------------------------------------------
// CLT suite

struct CltRow {
  std::size_t n = 0;
  std::string quantity;
  double estimate = 0;
  double std_error = 0;
  double target = 0;
  std::string check;  ///< "rel", "abs" or "report"
  double tolerance = 0;
  bool pass = true;
};

struct CltResult {
  std::vector<CltRow> rows;
  bool passed = true;
};

/// Sample moments of sqrt(n)(theta_hat - theta*), sqrt(n)(rho_hat - rho*) and
/// sqrt(n)(D_hat - D*) against sigma2_theta, sigma2_rho, sigma2_D and Gamma's off-diagonal.
CltResult run_clt_suite(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Deviation suite

/// Empirical counterpart of P(sqrt(n)/b_n |stat - limit| > x).
struct DeviationEstimate {
  Statistic statistic = Statistic::Theta;
  std::size_t n = 0;
  double b_n = 0;
  double x = 0;
  std::size_t exceedances = 0;
  std::size_t replications = 0;
  double p_hat = 0;    ///< two-sided exceedance frequency
  double ci_low = 0;   ///< 95% Clopper-Pearson interval for p_hat
  double ci_high = 0;
  double r_n = 0;      ///< -log(p_hat / 2) / b_n^2 (per-tail convention)
  double r_n_se = 0;   ///< delta-method standard error of r_n
  double rate_target = 0;   ///< I(x)
  double gauss_oracle = 0;  ///< -log(Phi_bar(x b_n / sigma_stat)) / b_n^2
  bool insufficient_events = false;

  double ratio_rate() const { return r_n / rate_target; }
  double ratio_gauss() const { return r_n / gauss_oracle; }
};

/// Finite-n reflection of D_hat - D* ~ -2 (rho_hat - rho*).
struct MappingCheck {
  std::size_t n = 0;
  double x = 0;
  double p_dw = 0;         ///< P(sqrt(n)/b_n |D_hat - D*| > x)
  double p_two_rho = 0;    ///< P(2 sqrt(n)/b_n |rho_hat - rho*| > x)
  double binomial_se = 0;
  bool pass = true;
};

struct DeviationResult {
  std::vector<DeviationEstimate> estimates;
  std::vector<MappingCheck> mapping;
  bool band_ok = true;     ///< every r_n / gauss_oracle inside [0.8, 1.25]
  bool trend_ok = true;    ///< r_n / I(x) non-decreasing along n_grid within noise
  bool mapping_ok = true;
  bool checks_applied = true;  ///< false for noise outside the Chen-Ledoux class
  bool passed = true;
};

inline constexpr double kGaussBandLow = 0.8;
inline constexpr double kGaussBandHigh = 1.25;
inline constexpr std::size_t kMinExceedances = 10;

/// Two-sided 95% Clopper-Pearson interval for k successes in n trials.
std::pair<double, double> clopper_pearson(std::size_t k, std::size_t n, double level = 0.95);

/// -log of the standard normal upper tail.
double neg_log_normal_tail(double z);

DeviationResult run_deviation_suite(const ExperimentConfig& cfg);

/// Throws InsufficientEventsError if the estimate rests on fewer than kMinExceedances events.
void require_sufficient_events(const DeviationEstimate& e);

// ---------------------------------------------------------------------------
// Convergence suite

struct ConvergenceRow {
  std::size_t n = 0;
  std::string functional;
  double target = 0;
  double delta = 0;
  double mean = 0;
  double freq = 0;     ///< fraction of replications with |F_n - target| > delta
  double freq_se = 0;
  double decay = 0;    ///< -log(freq) / b_n^2
  bool monotone = true;  ///< freq does not exceed the previous n's value beyond noise
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  bool passed = true;
};

ConvergenceResult run_convergence_suite(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Identity suite

struct IdentityRow {
  std::string identity;
  double max_residual = 0;
  double tolerance = 0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  bool report_only = false;
  bool pass = true;
};

struct IdentityResult {
  std::vector<IdentityRow> rows;
  bool passed = true;
};

inline constexpr double kIdentityTolerance = 1e-9;
inline constexpr double kJIdentityTolerance = 1e-10;
inline constexpr double kGammaTolerance = 1e-10;
inline constexpr double kSingularBand = 1e-3;

IdentityResult run_identity_suite(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Inequality suite

struct InequalityRow {
  std::string inequality;
  std::size_t paths = 0;
  std::size_t violations = 0;
  double max_ratio = 0;  ///< largest lhs / rhs seen
};

struct InequalityResult {
  std::vector<InequalityRow> rows;
  bool passed = true;
};

InequalityResult run_inequality_suite(const ExperimentConfig& cfg);

}  // namespace dwlab
