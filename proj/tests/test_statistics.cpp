#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "dwlab/statistics.hpp"
#include "oracles.hpp"

using namespace dwlab;

namespace {

double rel(long double expected, double got) {
  const long double scale = std::max(1.0L, std::abs(expected));
  return static_cast<double>(std::abs(static_cast<long double>(got) - expected) / scale);
}

Trajectory path_with(const Params& p, const std::vector<double>& x) {
  // Innovations that reproduce the given X path exactly enough for algebraic tests.
  Trajectory t;
  const auto n = static_cast<Eigen::Index>(x.size() - 1);
  t.x = Eigen::Map<const Eigen::VectorXd>(x.data(), n + 1);
  t.eps.resize(n + 1);
  t.v.resize(n);
  t.eps(0) = p.eps0;
  for (Eigen::Index k = 1; k <= n; ++k) {
    t.eps(k) = x[static_cast<std::size_t>(k)] - p.theta * x[static_cast<std::size_t>(k - 1)];
    t.v(k - 1) = t.eps(k) - p.rho * t.eps(k - 1);
  }
  return t;
}

}  // namespace

TEST_CASE("noiseless geometric path identifies theta") {
  const Params p{0.5, 0.0, 1.0, 1.0, 0.0};
  const auto t = propagate(p, std::vector<double>(10, 0.0));
  const auto l = ledger(t, p);
  CHECK(l.theta_hat == 0.5);
}

TEST_CASE("estimators approach their limits") {
  const Params p{0.5, 0.3, 1.0};
  const auto t = simulate(p, {NoiseFamily::Gaussian}, 100000, Substream{42, 0});
  const auto l = ledger(t, p);
  CHECK(std::abs(l.theta_hat - 0.6956522) < 0.02);
  CHECK(std::abs(l.dw - 1.7913043) < 0.05);
  CHECK(std::abs(l.rho_hat - 0.1043478) < 0.03);
  CHECK(std::abs(l.T_n - 0.63393194706994329) < 0.03);
}

TEST_CASE("remainder of the theta decomposition") {
  const Params rho0{0.5, 0.0, 1.0, 1.0, 2.0};
  CHECK(remainder_theta(simulate(rho0, {}, 50, Substream{1, 1}), rho0) == 0.0);

  const Params zero_init{0.5, 0.3, 1.0, 0.0, 0.0};
  const auto t = simulate(zero_init, {}, 50, Substream{1, 2});
  CHECK(remainder_theta(t, zero_init) == doctest::Approx(0.15 * t.x(50) * t.x(49)));

  const Params p{0.5, 0.3, 1.0, 1.0, 2.0};
  const auto fixed = path_with(p, {1.0, 0.7, 0.9, 1.1});
  CHECK(remainder_theta(fixed, p) == doctest::Approx(0.4485));
}

TEST_CASE("single pass ledger matches the two-pass oracle") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(-0.95, 0.95);
  std::normal_distribution<double> init(0.0, 2.0);
  for (std::uint64_t rep = 0; rep < 200; ++rep) {
    const Params p{u(gen), u(gen), 1.5, init(gen), init(gen)};
    const std::size_t n = rep % 2 ? 5000 : 37;
    const auto t = simulate(p, {rep % 3 == 0 ? NoiseFamily::SymmetricWeibull : NoiseFamily::Gaussian}, n,
                            Substream{7, rep});
    const auto l = ledger(t, p);
    const auto o = oracle::two_pass(t, p);
    CAPTURE(rep);
    CHECK(l.n == n);
    CHECK(rel(o.S_n, l.S_n) < 1e-12);
    CHECK(rel(o.S_nm1, l.S_nm1) < 1e-12);
    CHECK(rel(o.P_n, l.P_n) < 1e-12);
    CHECK(rel(o.Q_n, l.Q_n) < 1e-12);
    CHECK(rel(o.L_n, l.L_n) < 1e-12);
    CHECK(rel(o.M_n, l.M_n) < 1e-12);
    CHECK(rel(o.N_n, l.N_n) < 1e-12);
    CHECK(rel(o.T4_n, l.T4_n) < 1e-12);
    CHECK(rel(o.Gamma4_n, l.Gamma4_n) < 1e-12);
    CHECK(rel(o.theta_hat, l.theta_hat) < 1e-12);
    CHECK(rel(o.J_n, l.J_n) < 1e-12);
    CHECK(rel(o.J_nm1, l.J_nm1) < 1e-12);
    CHECK(rel(o.rho_hat, l.rho_hat) < 1e-12);
    CHECK(rel(o.dw, l.dw) < 1e-12);
    CHECK(rel(o.f_n, l.f_n) < 1e-12);
    CHECK(std::abs(static_cast<long double>(l.T_n) - o.T_n) < 1e-11);
  }
}

TEST_CASE("direct residual sums agree with the oracle to 1e-12") {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(-0.95, 0.95);
  for (std::uint64_t rep = 0; rep < 100; ++rep) {
    const Params p{u(gen), u(gen), 1.0, u(gen), u(gen)};
    const auto t = simulate(p, {}, 2000, Substream{3, rep});
    const auto l = ledger(t, p);
    const auto d = residual_sums(t, l.theta_hat);
    const auto o = oracle::two_pass(t, p);
    CHECK(rel(o.J_n, d.J_n) < 1e-12);
    CHECK(rel(o.J_nm1, d.J_nm1) < 1e-12);
    CHECK(rel(o.rho_hat, d.rho_hat) < 1e-12);
    CHECK(rel(o.dw, d.dw) < 1e-12);
    CHECK(rel(o.f_n, d.f_n) < 1e-12);
  }
}

TEST_CASE("streaming accumulator equals the batch ledger") {
  const Params p{-0.4, 0.7, 1.0, 0.3, -0.2};
  const auto t = simulate(p, {}, 500, Substream{5, 5});
  LedgerAccumulator acc(p.x0, p.eps0);
  for (std::size_t k = 1; k <= t.n(); ++k) acc.push(t.x(static_cast<Eigen::Index>(k)), t.innovation(k));
  CHECK(acc.finish(p) == ledger(t, p));
}

TEST_CASE("ledger invariants") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-0.95, 0.95);
  for (std::uint64_t rep = 0; rep < 300; ++rep) {
    const Params p{u(gen), u(gen), 1.0, u(gen), u(gen)};
    const auto l = ledger(simulate(p, {}, 200, Substream{6, rep}), p);
    CHECK(l.f_n >= 0.0);
    CHECK(l.f_n <= 1.0);
    CHECK(l.J_n >= l.J_nm1);
    CHECK(l.S_n >= l.S_nm1);
    CHECK(l.dw >= 0.0);
    CHECK(l.dw <= 4.0 + 1e-12);
    CHECK(std::abs(l.rho_hat) <= 1.0 + 1e-12);
  }
}

TEST_CASE("degenerate paths") {
  const Params p{0.5, 0.3, 1.0, 0.0, 0.0};
  CHECK_THROWS_AS(ledger(propagate(p, std::vector<double>(10, 0.0)), p), DegenerateError);
  LedgerAccumulator acc(0.0, 0.0);
  acc.push(1.0, 1.0);
  CHECK_THROWS_AS(acc.finish(p), DomainError);
}

TEST_CASE("theta decomposition is exact") {
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> u(-0.95, 0.95);
  double worst = 0;
  for (std::uint64_t rep = 0; rep < 1000; ++rep) {
    const Params p{u(gen), u(gen), 1.0, u(gen), u(gen)};
    const auto t = simulate(p, {}, 1000, Substream{8, rep});
    worst = std::max(worst, check_theta_decomposition(ledger(t, p), p));
  }
  CHECK(worst <= 1e-9);
  const Params white{0.0, 0.0, 1.0};
  const auto t = simulate(white, {}, 1000, Substream{8, 9999});
  const auto l = ledger(t, white);
  CHECK(check_theta_decomposition(l, white) <= 1e-9);
  CHECK(l.theta_hat == doctest::Approx(l.M_n / l.S_nm1).epsilon(1e-12));
}

TEST_CASE("S_n decomposition") {
  const Params white{0.0, 0.0, 1.0};
  auto t = simulate(white, {}, 500, Substream{9, 0});
  CHECK(check_sn_decomposition(ledger(t, white), t, white) <= 1e-9);

  const Params rho0{0.6, 0.0, 1.0, 0.5, 0.0};
  t = simulate(rho0, {}, 500, Substream{9, 1});
  CHECK(check_sn_decomposition(ledger(t, rho0), t, rho0) <= 1e-9);

  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> u(-0.95, 0.95);
  double worst = 0;
  for (std::uint64_t rep = 0; rep < 100; ++rep) {
    const Params p{u(gen), u(gen), 1.0, u(gen), u(gen)};
    t = simulate(p, {}, 500, Substream{9, 100 + rep});
    worst = std::max(worst, check_sn_decomposition(ledger(t, p), t, p));
  }
  MESSAGE("max S_n decomposition residual over 100 paths: " << worst);
  CHECK(worst <= 1e-9);
}

TEST_CASE("Durbin-Watson identity") {
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> u(-0.95, 0.95);
  for (std::uint64_t rep = 0; rep < 200; ++rep) {
    const Params p{u(gen), u(gen), 1.0, u(gen), u(gen)};
    const auto t = simulate(p, {}, 800, Substream{10, rep});
    const auto l = ledger(t, p);
    CHECK(check_dw_identity(l) <= 1e-9);
    CHECK(check_dw_identity(with_direct_residuals(l, residual_sums(t, l.theta_hat))) <= 1e-9);
  }
  // With X_0 = 0 the boundary term vanishes.
  const Params p{0.5, 0.3, 1.0, 0.0, 0.7};
  const auto t = simulate(p, {}, 300, Substream{10, 999});
  const auto d = with_direct_residuals(ledger(t, p), residual_sums(t, ledger(t, p).theta_hat));
  CHECK(d.dw == doctest::Approx(2 * (1 - d.rho_hat) - (1 - 2 * d.rho_hat) * d.f_n).epsilon(1e-12));

  const Params big{0.5, 0.3, 1.0, 1.0, 1.0};
  const auto tb = simulate(big, {}, 100000, Substream{10, 1000});
  const auto lb = ledger(tb, big);
  CHECK(std::abs(lb.dw - 2 * (1 - lb.rho_hat)) <= 5 * (lb.f_n + lb.resid0 * lb.resid0 / lb.J_n));
}

TEST_CASE("J identity") {
  const Params p{0.9, -0.8, 1.0, 3.0, -1.0};
  const auto t = simulate(p, {}, 5000, Substream{11, 0});
  CHECK(check_j_identity(ledger(t, p), t) <= 1e-10);
}

TEST_CASE("almost sure inequalities") {
  const Params white{0.0, 0.0, 1.0};
  auto t = simulate(white, {}, 500, Substream{12, 0});
  CHECK(check_as_inequalities(t, ledger(t, white), white).all());

  const Params heavy{0.9, 0.9, 1.0, 1.0, 1.0};
  t = simulate(heavy, {}, 2000, Substream{12, 1});
  const auto r = check_as_inequalities(t, ledger(t, heavy), heavy);
  CHECK(r.all());
  CHECK(r.sn_ratio < 1.0);

  std::mt19937_64 gen(14);
  std::uniform_real_distribution<double> u(-0.99, 0.99);
  std::normal_distribution<double> init(0.0, 3.0);
  std::size_t failures = 0;
  for (std::uint64_t rep = 0; rep < 10000; ++rep) {
    const Params p{u(gen), u(gen), 1.0, init(gen), init(gen)};
    const NoiseFamily family = rep % 3 == 0 ? NoiseFamily::StudentT : NoiseFamily::Gaussian;
    t = simulate(p, {family}, 200, Substream{13, rep});
    if (!check_as_inequalities(t, ledger(t, p), p).all()) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("explosion coefficient shrinks with n") {
  const Params p{0.5, 0.3, 1.0};
  std::vector<double> medians;
  for (std::size_t n : {100u, 1000u, 10000u}) {
    std::vector<double> f;
    for (std::uint64_t rep = 0; rep < 100; ++rep) f.push_back(ledger(simulate(p, {}, n, Substream{15, rep}), p).f_n);
    std::nth_element(f.begin(), f.begin() + 50, f.end());
    medians.push_back(f[50]);
  }
  CHECK(medians[1] < medians[0]);
  CHECK(medians[2] < medians[1]);
}

TEST_CASE("compensated sums") {
  CompensatedSum s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1000.0);
}
