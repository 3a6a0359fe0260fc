#pragma once

#include <cstddef>

#include "dwlab/asymptotics.hpp"
#include "dwlab/model.hpp"

namespace dwlab {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      carry_ += (sum_ - t) + x;
    else
      carry_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

/// Every functional of one trajectory, finalised from a single pass.
///
/// Residuals are eps_hat_k = X_k - theta_hat X_{k-1} for k >= 1 and eps_hat_0 = X_0,
/// which makes J_n = S_n - 2 theta_hat P_n + theta_hat^2 S_{n-1} exact.
struct StatLedger {
  std::size_t n = 0;
  double L_n = 0;      ///< sum_{k=1}^n V_k^2
  double M_n = 0;      ///< sum_{k=1}^n X_{k-1} V_k
  double N_n = 0;      ///< sum_{k=2}^n X_{k-2} V_k
  double Q_n = 0;      ///< sum_{k=2}^n X_{k-2} X_k
  double S_n = 0;      ///< sum_{k=0}^n X_k^2
  double S_nm1 = 0;    ///< sum_{k=0}^{n-1} X_k^2
  double P_n = 0;      ///< sum_{k=1}^n X_{k-1} X_k
  double J_n = 0;      ///< sum_{k=0}^n eps_hat_k^2
  double J_nm1 = 0;    ///< sum_{k=0}^{n-1} eps_hat_k^2
  double theta_hat = 0;
  double rho_hat = 0;
  double dw = 0;
  double f_n = 0;      ///< eps_hat_n^2 / J_n
  double T_n = 0;
  double R_theta = 0;  ///< theta rho X_n X_{n-1} + rho X_0 (eps_0 - X_0)
  double T4_n = 0;     ///< sum_{k=0}^n X_k^4
  double Gamma4_n = 0; ///< sum_{k=1}^n V_k^4
  double resid0 = 0;   ///< eps_hat_0 = X_0

  friend bool operator==(const StatLedger&, const StatLedger&) = default;
};

/// Streaming form of `ledger`: feed X_0 (and eps_0) once, then (X_k, V_k) for k = 1..n.
class LedgerAccumulator {
 public:
  LedgerAccumulator(double x0, double eps0) : x0_(x0), eps0_(eps0), x_prev_(x0) {
    s_.add(x0 * x0);
    t4_.add(x0 * x0 * x0 * x0);
  }

  void push(double x, double v) noexcept {
    ++n_;
    s_prev2_ = s_prev_;
    s_prev_ = s_;
    s_.add(x * x);
    p_prev_ = p_;
    p_.add(x_prev_ * x);
    m_.add(x_prev_ * v);
    if (n_ >= 2) {
      q_.add(x_prev2_ * x);
      nn_.add(x_prev2_ * v);
    }
    const double v2 = v * v;
    l_.add(v2);
    g4_.add(v2 * v2);
    const double x2 = x * x;
    t4_.add(x2 * x2);
    x_prev2_ = x_prev_;
    x_prev_ = x;
  }

  std::size_t size() const noexcept { return n_; }

  /// Throws DomainError for n < 2 and DegenerateError when S_{n-1} = 0 or J_{n-1} = 0.
  StatLedger finish(const Params& p) const;

 private:
  double x0_;
  double eps0_;
  double x_prev_;
  double x_prev2_ = 0.0;
  std::size_t n_ = 0;
  CompensatedSum s_, s_prev_, s_prev2_, p_, p_prev_, q_, l_, m_, nn_, t4_, g4_;
};

StatLedger ledger(const Trajectory& traj, const Params& params);

/// theta rho X_n X_{n-1} + rho X_0 (eps_0 - X_0).
double remainder_theta(const Trajectory& traj, const Params& params);

/// |(theta_hat - theta*) - (M_n + R_n(theta)) / ((1 + theta rho) S_{n-1})|.
double check_theta_decomposition(const StatLedger& ledger, const Params& params);

/// Residual of the exact decomposition of S_n / n - ell into the innovation energy,
/// the two martingales and the boundary remainder R_n.
double check_sn_decomposition(const StatLedger& ledger, const Trajectory& traj, const Params& params);

/// |dw - [2(1 - rho_hat) - (1 - 2 rho_hat) f_n - eps_hat_0^2 / J_n]|.
double check_dw_identity(const StatLedger& ledger);

/// Residual-based quantities summed directly over eps_hat_k (second pass over the path).
struct ResidualSums {
  double J_n = 0;
  double J_nm1 = 0;
  double rho_hat = 0;
  double dw = 0;
  double f_n = 0;
};

ResidualSums residual_sums(const Trajectory& traj, double theta_hat);

/// |J_n(ledger) - J_n(direct)| / J_n(direct).
double check_j_identity(const StatLedger& ledger, const Trajectory& traj);

/// A copy of `ledger` whose residual fields come from `residual_sums`.
StatLedger with_direct_residuals(const StatLedger& ledger, const ResidualSums& direct);

struct InequalityReport {
  bool sn = false;      ///< S_n <= a X_0^2 + b eps_0^2 + b L_n
  bool max_x = false;   ///< max X_k^2 <= X_0^2 / (1-|theta|) + max eps_k^2 / (1-|theta|)^2
  bool max_eps = false; ///< max eps_k^2 <= eps_0^2 / (1-|rho|) + max V_k^2 / (1-|rho|)^2
  bool t4 = false;      ///< sum X_k^4 <= a4 X_0^4 + b4 eps_0^4 + b4 sum V_k^4
  /// lhs / rhs for each inequality (<= 1 when it holds)
  double sn_ratio = 0, max_x_ratio = 0, max_eps_ratio = 0, t4_ratio = 0;

  bool all() const noexcept { return sn && max_x && max_eps && t4; }
};

InequalityReport check_as_inequalities(const Trajectory& traj, const StatLedger& ledger, const Params& params);

}  // namespace dwlab
