#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dwlab/errors.hpp"
#include "dwlab/noise.hpp"
#include "dwlab/rng.hpp"

namespace dwlab {

/// Parameters of X_n = theta X_{n-1} + eps_n, eps_n = rho eps_{n-1} + V_n.
template <typename Scalar = double>
struct ModelParams {
  Scalar theta = 0;
  Scalar rho = 0;
  Scalar sigma2 = 1;
  Scalar x0 = 0;
  Scalar eps0 = 0;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

using Params = ModelParams<double>;

template <typename Scalar>
const ModelParams<Scalar>& validate_params(const ModelParams<Scalar>& p) {
  using std::abs;
  if (!(abs(p.theta) < 1) || !(abs(p.rho) < 1))
    throw StabilityError("model is unstable: require |theta| < 1 and |rho| < 1");
  if (!(p.sigma2 > 0)) throw DomainError("noise variance sigma2 must be > 0");
  return p;
}

/// Companion matrix of the lag vector (X_n, X_{n-1}); its eigenvalues are theta and rho.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> companion_matrix(const ModelParams<Scalar>& p) {
  Eigen::Matrix<Scalar, 2, 2> a;
  a << p.theta + p.rho, -p.theta * p.rho, Scalar(1), Scalar(0);
  return a;
}

template <typename Derived>
typename Derived::Scalar spectral_radius(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  Eigen::EigenSolver<Eigen::Matrix<Scalar, Derived::RowsAtCompileTime, Derived::ColsAtCompileTime>> solver(
      m.eval(), /*computeEigenvectors=*/false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

/// One simulated path. `x` and `eps` hold indices 0..n; `v` holds V_1..V_n at
/// positions 0..n-1 (use innovation(k)).
struct Trajectory {
  Eigen::VectorXd x;
  Eigen::VectorXd eps;
  Eigen::VectorXd v;

  std::size_t n() const noexcept { return static_cast<std::size_t>(v.size()); }
  double innovation(std::size_t k) const { return v(static_cast<Eigen::Index>(k - 1)); }
};

/// Runs both recurrences from (p.x0, p.eps0) over the given innovations.
Trajectory propagate(const Params& p, std::span<const double> innovations);

/// Draws n innovations from `noise` (rescaled to p.sigma2) and propagates them.
Trajectory simulate(const Params& p, const NoiseSpec& noise, std::size_t n, Substream stream);

/// Max over k of the recurrence defects, each divided by (1 + |x_k|) resp. (1 + |eps_k|).
double recurrence_defect(const Params& p, const Trajectory& t);

}  // namespace dwlab
