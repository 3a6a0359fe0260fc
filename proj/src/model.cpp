#include "dwlab/model.hpp"

#include <algorithm>
#include <cmath>

namespace dwlab {

Trajectory propagate(const Params& p, std::span<const double> innovations) {
  const auto n = static_cast<Eigen::Index>(innovations.size());
  Trajectory t;
  t.x.resize(n + 1);
  t.eps.resize(n + 1);
  t.v = Eigen::Map<const Eigen::VectorXd>(innovations.data(), n);
  t.x(0) = p.x0;
  t.eps(0) = p.eps0;
  for (Eigen::Index k = 1; k <= n; ++k) {
    t.eps(k) = p.rho * t.eps(k - 1) + innovations[static_cast<std::size_t>(k - 1)];
    t.x(k) = p.theta * t.x(k - 1) + t.eps(k);
  }
  return t;
}

Trajectory simulate(const Params& p, const NoiseSpec& noise, std::size_t n, Substream stream) {
  validate_params(p);
  if (n < 2) throw DomainError("simulate needs n >= 2");
  NoiseSpec scaled = noise;
  scaled.sigma2 = p.sigma2;
  const auto v = sample_noise(scaled, n, stream);
  return propagate(p, v);
}

double recurrence_defect(const Params& p, const Trajectory& t) {
  double worst = 0.0;
  for (std::size_t k = 1; k <= t.n(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    const double dx = std::abs(t.x(i) - p.theta * t.x(i - 1) - t.eps(i)) / (1.0 + std::abs(t.x(i)));
    const double de = std::abs(t.eps(i) - p.rho * t.eps(i - 1) - t.innovation(k)) / (1.0 + std::abs(t.eps(i)));
    worst = std::max({worst, dx, de});
  }
  return worst;
}

}  // namespace dwlab
