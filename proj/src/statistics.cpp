#include "dwlab/statistics.hpp"

#include <algorithm>
#include <cmath>

namespace dwlab {

StatLedger LedgerAccumulator::finish(const Params& p) const {
  if (n_ < 2) throw DomainError("ledger needs n >= 2");
  StatLedger out;
  out.n = n_;
  out.S_n = s_.value();
  out.S_nm1 = s_prev_.value();
  const double s_nm2 = s_prev2_.value();
  out.P_n = p_.value();
  const double p_nm1 = p_prev_.value();
  out.Q_n = q_.value();
  out.L_n = l_.value();
  out.M_n = m_.value();
  out.N_n = nn_.value();
  out.T4_n = t4_.value();
  out.Gamma4_n = g4_.value();
  out.resid0 = x0_;

  if (!(out.S_nm1 > 0)) throw DegenerateError("S_{n-1} = 0: the path is identically zero");
  const double th = out.P_n / out.S_nm1;
  out.theta_hat = th;
  out.J_n = out.S_n - 2.0 * th * out.P_n + th * th * out.S_nm1;
  out.J_nm1 = out.S_nm1 - 2.0 * th * p_nm1 + th * th * s_nm2;
  if (!(out.J_nm1 > 0)) throw DegenerateError("J_{n-1} = 0: residuals vanish");

  // sum_{k=1}^n eps_hat_k eps_hat_{k-1}, expanded in the raw moment sums.
  const double cross = out.P_n - th * out.S_nm1 - th * out.Q_n + th * th * p_nm1;
  out.rho_hat = cross / out.J_nm1;
  const double diff_energy = out.J_n + out.J_nm1 - x0_ * x0_ - 2.0 * cross;
  out.dw = diff_energy / out.J_n;
  const double last = x_prev_ - th * x_prev2_;
  out.f_n = last * last / out.J_n;

  const auto s = summary(p);
  const double ts = s.theta_star;
  const double rs = s.rho_star;
  out.T_n = 1.0 + ts * rs - (1.0 + rs * (th + ts)) * out.S_n / out.S_nm1 +
            (2.0 * rs + th + ts) * out.P_n / out.S_nm1 - out.Q_n / out.S_nm1;
  out.R_theta = p.theta * p.rho * x_prev_ * x_prev2_ + p.rho * x0_ * (eps0_ - x0_);
  return out;
}

StatLedger ledger(const Trajectory& traj, const Params& params) {
  LedgerAccumulator acc(traj.x(0), traj.eps(0));
  for (std::size_t k = 1; k <= traj.n(); ++k) acc.push(traj.x(static_cast<Eigen::Index>(k)), traj.innovation(k));
  return acc.finish(params);
}

double remainder_theta(const Trajectory& traj, const Params& params) {
  const auto n = static_cast<Eigen::Index>(traj.n());
  const double x0 = traj.x(0);
  const double xn_1 = n >= 1 ? traj.x(n - 1) : 0.0;
  return params.theta * params.rho * traj.x(n) * xn_1 + params.rho * x0 * (traj.eps(0) - x0);
}

double check_theta_decomposition(const StatLedger& l, const Params& params) {
  if (!(l.S_nm1 > 0)) throw DegenerateError("S_{n-1} = 0");
  const auto s = summary(params);
  const double predicted = (l.M_n + l.R_theta) / ((1.0 + params.theta * params.rho) * l.S_nm1);
  return std::abs((l.theta_hat - s.theta_star) - predicted);
}

double check_sn_decomposition(const StatLedger& l, const Trajectory& traj, const Params& params) {
  const auto s = summary(params);
  const double th = params.theta;
  const double rh = params.rho;
  const double tr = th * rh;
  const double sum = th + rh;
  const double sigma2 = params.sigma2;
  const auto n_idx = static_cast<Eigen::Index>(traj.n());
  const double n = static_cast<double>(traj.n());
  const double xn = traj.x(n_idx);
  const double xn1 = traj.x(n_idx - 1);
  const double x0 = traj.x(0);
  const double e0 = traj.eps(0);
  const double v1 = traj.innovation(1);

  const double xi1 = (1.0 - 2.0 * tr - rh * rh) * x0 * x0 + rh * rh * e0 * e0 + 2.0 * tr * x0 * e0 -
                     2.0 * rh * s.rho_star * (e0 - x0) * x0 + 2.0 * rh * (e0 - x0) * v1;
  const double r_n = (2.0 * sum * s.rho_star - sum * sum - tr * tr) * xn * xn - tr * tr * xn1 * xn1 +
                     2.0 * s.rho_star * xn * xn1 + xi1;
  const double lhs = l.S_n / n - s.ell;
  const double rhs = s.ell / sigma2 *
                     ((l.L_n / n - sigma2) + 2.0 * s.theta_star * l.M_n / n - 2.0 * tr * l.N_n / n + r_n / n);
  return std::abs(lhs - rhs);
}

double check_dw_identity(const StatLedger& l) {
  if (!(l.J_n > 0)) throw DegenerateError("J_n = 0");
  const double predicted = 2.0 * (1.0 - l.rho_hat) - (1.0 - 2.0 * l.rho_hat) * l.f_n - l.resid0 * l.resid0 / l.J_n;
  return std::abs(l.dw - predicted);
}

ResidualSums residual_sums(const Trajectory& traj, double theta_hat) {
  const std::size_t n = traj.n();
  CompensatedSum energy, lagged_energy, cross, diff;
  double prev = traj.x(0);
  energy.add(prev * prev);
  for (std::size_t k = 1; k <= n; ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    const double e = traj.x(i) - theta_hat * traj.x(i - 1);
    lagged_energy.add(prev * prev);
    energy.add(e * e);
    cross.add(e * prev);
    diff.add((e - prev) * (e - prev));
    prev = e;
  }
  ResidualSums out;
  out.J_n = energy.value();
  out.J_nm1 = lagged_energy.value();
  out.rho_hat = cross.value() / out.J_nm1;
  out.dw = diff.value() / out.J_n;
  out.f_n = prev * prev / out.J_n;
  return out;
}

double check_j_identity(const StatLedger& l, const Trajectory& traj) {
  const auto direct = residual_sums(traj, l.theta_hat);
  if (!(direct.J_n > 0)) throw DegenerateError("J_n = 0");
  return std::abs(l.J_n - direct.J_n) / direct.J_n;
}

StatLedger with_direct_residuals(const StatLedger& l, const ResidualSums& direct) {
  StatLedger out = l;
  out.J_n = direct.J_n;
  out.J_nm1 = direct.J_nm1;
  out.rho_hat = direct.rho_hat;
  out.dw = direct.dw;
  out.f_n = direct.f_n;
  return out;
}

InequalityReport check_as_inequalities(const Trajectory& traj, const StatLedger& l, const Params& params) {
  // lhs <= rhs up to rounding in the accumulated sums.
  constexpr double kSlack = 1e-12;
  const auto ratio = [](double lhs, double rhs) { return rhs > 0 ? lhs / rhs : (lhs > 0 ? INFINITY : 0.0); };

  const double ct = 1.0 - std::abs(params.theta);
  const double cr = 1.0 - std::abs(params.rho);
  const double x0 = traj.x(0);
  const double e0 = traj.eps(0);

  double max_x2 = 0, max_e2 = 0, max_v2 = 0;
  for (std::size_t k = 1; k <= traj.n(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    max_x2 = std::max(max_x2, traj.x(i) * traj.x(i));
    max_e2 = std::max(max_e2, traj.eps(i) * traj.eps(i));
    max_v2 = std::max(max_v2, traj.innovation(k) * traj.innovation(k));
  }

  InequalityReport r;
  const double a2 = 1.0 + 1.0 / (ct * ct);
  const double b2 = 1.0 / (cr * cr * ct * ct);
  r.sn_ratio = ratio(l.S_n, a2 * x0 * x0 + b2 * e0 * e0 + b2 * l.L_n);
  r.max_x_ratio = ratio(max_x2, x0 * x0 / ct + max_e2 / (ct * ct));
  r.max_eps_ratio = ratio(max_e2, e0 * e0 / cr + max_v2 / (cr * cr));
  const double a4 = 1.0 + 1.0 / std::pow(ct, 4);
  const double b4 = 1.0 / (std::pow(cr, 4) * std::pow(ct, 4));
  r.t4_ratio = ratio(l.T4_n, a4 * std::pow(x0, 4) + b4 * std::pow(e0, 4) + b4 * l.Gamma4_n);

  r.sn = r.sn_ratio <= 1.0 + kSlack;
  r.max_x = r.max_x_ratio <= 1.0 + kSlack;
  r.max_eps = r.max_eps_ratio <= 1.0 + kSlack;
  r.t4 = r.t4_ratio <= 1.0 + kSlack;
  return r;
}

}  // namespace dwlab
