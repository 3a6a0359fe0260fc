#pragma once

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "dwlab/errors.hpp"
#include "dwlab/model.hpp"

namespace dwlab {

/// Closed-form almost-sure limits, asymptotic variances and limit matrices of the
/// least squares estimator, the serial correlation estimator and the Durbin-Watson
/// statistic for a stable parameter pair.
template <typename Scalar = double>
struct AsymptoticSummary {
  using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;

  Scalar theta_star{};  ///< a.s. limit of theta_hat
  Scalar rho_star{};    ///< a.s. limit of rho_hat
  Scalar d_star{};      ///< a.s. limit of the Durbin-Watson statistic
  Scalar ell{};         ///< a.s. limit of S_n / n
  Scalar ell1{};        ///< a.s. limit of P_n / n
  Scalar ell2{};        ///< a.s. limit of Q_n / n
  Scalar sigma2_theta{};
  Scalar sigma2_rho{};
  Scalar sigma2_d{};
  Matrix2 gamma = Matrix2::Zero();     ///< joint asymptotic covariance of (theta_hat, rho_hat)
  Matrix2 lambda = Matrix2::Zero();    ///< limit of <Z>_n / (n sigma2) for Z_n = (M_n, N_n)
  Matrix2 a_limit = Matrix2::Zero();   ///< limit of the normalising matrices A_n
  Scalar t_limit{};  ///< limit of T_n
  Scalar j_limit{};  ///< limit of J_n / n
  Scalar sigma2{};   ///< innovation variance the summary was built for
};

using Summary = AsymptoticSummary<double>;

template <typename Scalar>
AsymptoticSummary<Scalar> summary(const ModelParams<Scalar>& p) {
  validate_params(p);
  const Scalar th = p.theta;
  const Scalar rh = p.rho;
  const Scalar tr = th * rh;
  const Scalar one(1);

  AsymptoticSummary<Scalar> s;
  s.sigma2 = p.sigma2;
  s.theta_star = (th + rh) / (one + tr);
  s.rho_star = tr * s.theta_star;
  s.d_star = Scalar(2) * (one - s.rho_star);

  const Scalar one_m_t2 = one - th * th;
  const Scalar one_m_r2 = one - rh * rh;
  const Scalar one_p_tr = one + tr;
  const Scalar one_m_tr = one - tr;
  const Scalar cube = one_p_tr * one_p_tr * one_p_tr;

  s.ell = p.sigma2 * one_p_tr / (one_m_t2 * one_m_tr * one_m_r2);
  s.ell1 = s.theta_star * s.ell;
  s.ell2 = ((th + rh) * s.theta_star - tr) * s.ell;

  s.sigma2_theta = one_m_t2 * one_m_tr * one_m_r2 / cube;
  const Scalar sum = th + rh;
  s.sigma2_rho = one_m_tr / cube * (sum * sum * one_p_tr * one_p_tr + tr * tr * one_m_t2 * one_m_r2);
  s.sigma2_d = Scalar(4) * s.sigma2_rho;

  s.gamma << s.sigma2_theta, tr * s.sigma2_theta, tr * s.sigma2_theta, s.sigma2_rho;
  s.lambda << one, s.theta_star, s.theta_star, one;
  s.lambda *= s.ell;

  const Scalar ts2 = s.theta_star * s.theta_star;
  s.a_limit << one - ts2, Scalar(0), tr + ts2, -sum;
  s.a_limit /= s.ell * one_p_tr * (one - ts2);

  s.t_limit = ts2 + tr;
  s.j_limit = s.ell * (one - ts2);
  return s;
}

namespace detail {

template <typename Scalar>
void require_invertible(const ModelParams<Scalar>& p) {
  if (p.theta + p.rho == Scalar(0))
    throw SingularError("limit matrices are singular when theta = -rho");
}

template <typename Scalar>
Scalar quadratic_rate(Scalar x, Scalar variance) {
  if (variance > Scalar(0)) return x * x / (Scalar(2) * variance);
  return x == Scalar(0) ? Scalar(0) : std::numeric_limits<Scalar>::infinity();
}

}  // namespace detail

/// Max entrywise |Gamma - sigma2 A Lambda A'|.
template <typename Scalar>
Scalar gamma_cross_check(const AsymptoticSummary<Scalar>& s, const ModelParams<Scalar>& p) {
  detail::require_invertible(p);
  const typename AsymptoticSummary<Scalar>::Matrix2 assembled =
      s.sigma2 * s.a_limit * s.lambda * s.a_limit.transpose();
  return (assembled - s.gamma).cwiseAbs().maxCoeff();
}

template <typename Scalar>
struct DetAudit {
  Scalar direct{};         ///< det computed from the entries of Gamma
  Scalar printed{};        ///< sigma2_theta (theta+rho)^2 (1-theta rho) / (1+rho^2)
  Scalar closed_form{};    ///< sigma2_theta (theta+rho)^2 (1-theta rho) / (1+theta rho)
};

template <typename Scalar>
DetAudit<Scalar> det_gamma_audit(const AsymptoticSummary<Scalar>& s, const ModelParams<Scalar>& p) {
  const Scalar sum = p.theta + p.rho;
  const Scalar tr = p.theta * p.rho;
  const Scalar common = s.sigma2_theta * sum * sum * (Scalar(1) - tr);
  DetAudit<Scalar> out;
  out.direct = s.gamma(0, 0) * s.gamma(1, 1) - s.gamma(0, 1) * s.gamma(1, 0);
  out.printed = common / (Scalar(1) + p.rho * p.rho);
  out.closed_form = common / (Scalar(1) + tr);
  return out;
}

template <typename Scalar>
Scalar rate_theta(Scalar x, const AsymptoticSummary<Scalar>& s) {
  return detail::quadratic_rate(x, s.sigma2_theta);
}

template <typename Scalar>
Scalar rate_rho(Scalar x, const AsymptoticSummary<Scalar>& s) {
  return detail::quadratic_rate(x, s.sigma2_rho);
}

template <typename Scalar>
Scalar rate_dw(Scalar x, const AsymptoticSummary<Scalar>& s) {
  return detail::quadratic_rate(x, s.sigma2_d);
}

/// Joint rate K(v) = v' Gamma^{-1} v / 2. Inside the band 0 < |theta+rho| < 1e-3 the
/// inverse is formed from the adjugate and the directly computed determinant.
template <typename Scalar>
Scalar rate_joint(const Eigen::Matrix<Scalar, 2, 1>& v, const AsymptoticSummary<Scalar>& s,
                  const ModelParams<Scalar>& p) {
  using std::abs;
  detail::require_invertible(p);
  const auto& g = s.gamma;
  if (abs(p.theta + p.rho) < Scalar(1e-3)) {
    const Scalar det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
    if (det == Scalar(0)) throw SingularError("Gamma has zero determinant");
    const Scalar quad = g(1, 1) * v(0) * v(0) - Scalar(2) * g(0, 1) * v(0) * v(1) + g(0, 0) * v(1) * v(1);
    return quad / (Scalar(2) * det);
  }
  const Eigen::Matrix<Scalar, 2, 1> w = g.ldlt().solve(v);
  return v.dot(w) / Scalar(2);
}

enum class RateTarget { Theta, Rho };

/// Rates on the degenerate line theta = -rho, where theta_star = 0.
template <typename Scalar>
Scalar rate_special_theta_eq_neg_rho(Scalar x, Scalar theta, RateTarget which) {
  const Scalar t2 = theta * theta;
  const Scalar base = x * x * (Scalar(1) - t2) / (Scalar(2) * (Scalar(1) + t2));
  if (which == RateTarget::Theta) return base;
  if (t2 == Scalar(0)) return x == Scalar(0) ? Scalar(0) : std::numeric_limits<Scalar>::infinity();
  return base / (t2 * t2);
}

/// Speed b_n = n^alpha with 0 < alpha < 1/2.
inline double bn_sequence(double n, double alpha) {
  if (!(alpha > 0.0 && alpha < 0.5))
    throw DomainError("speed exponent alpha must lie in (0, 1/2), got " + std::to_string(alpha));
  return std::pow(n, alpha);
}

}  // namespace dwlab
