#include <doctest.h>

#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "dwlab/lab.hpp"

using namespace dwlab;

TEST_CASE("replication runner returns results in index order") {
  auto square = [](std::size_t i) { return static_cast<double>(i * i); };
  const auto one = run_replications(1000, 1, square);
  const auto many = run_replications(1000, 8, square);
  CHECK(one == many);
  CHECK(one[31] == 961.0);
  CHECK_THROWS_AS(run_replications(100, 4,
                                   [](std::size_t i) -> int {
                                     if (i == 57) throw DegenerateError("boom");
                                     return 0;
                                   }),
                  DegenerateError);
}

TEST_CASE("clopper-pearson interval") {
  // Known values: 0 of 10 gives [0, 0.3085]; 5 of 10 gives [0.1871, 0.8129].
  auto [lo0, hi0] = clopper_pearson(0, 10);
  CHECK(lo0 == 0.0);
  CHECK(hi0 == doctest::Approx(0.30849).epsilon(1e-4));
  auto [lo5, hi5] = clopper_pearson(5, 10);
  CHECK(lo5 == doctest::Approx(0.18709).epsilon(1e-4));
  CHECK(hi5 == doctest::Approx(0.81291).epsilon(1e-4));
  auto [lo, hi] = clopper_pearson(10, 10);
  CHECK(hi == 1.0);
  CHECK(lo == doctest::Approx(0.69150).epsilon(1e-4));
}

TEST_CASE("normal tail") {
  boost::math::normal_distribution<double> z;
  for (double x : {0.0, 1.0, 2.5, 6.0, 20.0, 24.9})
    CHECK(neg_log_normal_tail(x) == doctest::Approx(-std::log(boost::math::cdf(boost::math::complement(z, x)))));
  // Far tail against 30-digit reference values.
  CHECK(neg_log_normal_tail(25.0) == doctest::Approx(316.639408008020258935).epsilon(1e-13));
  CHECK(neg_log_normal_tail(40.0) == doctest::Approx(804.608442013753788166).epsilon(1e-13));
}

TEST_CASE("config validation") {
  ExperimentConfig c;
  CHECK_NOTHROW(validate_config(c));
  c.suite = Suite::Deviations;
  c.alpha = 0.5;
  CHECK_THROWS_AS(validate_config(c), DomainError);
  c.alpha = 0.2;
  c.params.theta = 1.0;
  CHECK_THROWS_AS(validate_config(c), StabilityError);
  c.params.theta = 0.5;
  c.n_grid = {1000, 100};
  CHECK_THROWS_AS(validate_config(c), DomainError);
  c.n_grid = {100};
  c.random_params = true;
  CHECK_THROWS_AS(validate_config(c), DomainError);
  c.suite = Suite::Identities;
  CHECK_NOTHROW(validate_config(c));
  c.replications = 10;
  CHECK_THROWS_AS(validate_config(c), DomainError);
}

TEST_CASE("burn-in length") {
  CHECK(burn_in_steps(Params{0.5, 0.3, 1}) == 20);
  CHECK(burn_in_steps(Params{0.0, -0.9, 1}) == 100);
}

TEST_CASE("clt suite at the reference point") {
  ExperimentConfig c;
  c.suite = Suite::Clt;
  c.n_grid = {2000};
  c.replications = 2000;
  const auto r = run_clt_suite(c);
  CHECK(r.passed);
  CHECK(r.rows.size() == 8);
}

TEST_CASE("clt suite with white noise") {
  ExperimentConfig c;
  c.suite = Suite::Clt;
  c.params = {0.0, 0.0, 1.0};
  c.n_grid = {2000};
  c.replications = 2000;
  for (const auto& row : run_clt_suite(c).rows)
    if (row.quantity == "var_theta") CHECK(std::abs(row.estimate - 1.0) < 0.1);
}

TEST_CASE("deviation suite on a small grid") {
  ExperimentConfig c;
  c.suite = Suite::Deviations;
  c.n_grid = {200, 2000};
  c.replications = 20000;
  const auto r = run_deviation_suite(c);
  CHECK(r.estimates.size() == 6);
  CHECK(r.mapping.size() == 2);
  CHECK(r.band_ok);
  CHECK(r.mapping_ok);
  for (const auto& e : r.estimates) {
    CHECK(e.b_n == doctest::Approx(std::pow(static_cast<double>(e.n), 0.2)));
    CHECK(e.ci_low <= e.p_hat);
    CHECK(e.p_hat <= e.ci_high);
    CHECK_FALSE(e.insufficient_events);
    CHECK_NOTHROW(require_sufficient_events(e));
  }
}

TEST_CASE("too few exceedances are flagged") {
  ExperimentConfig c;
  c.suite = Suite::Deviations;
  c.n_grid = {500};
  c.replications = 200;
  c.statistics = {Statistic::Theta};
  c.z = 4.5;
  const auto r = run_deviation_suite(c);
  REQUIRE(r.estimates.size() == 1);
  CHECK(r.estimates[0].insufficient_events);
  CHECK_THROWS_AS(require_sufficient_events(r.estimates[0]), InsufficientEventsError);
  CHECK_FALSE(r.passed);
}

TEST_CASE("convergence suite") {
  ExperimentConfig c;
  c.suite = Suite::Convergence;
  c.n_grid = {100, 1000, 5000};
  c.replications = 400;
  const auto r = run_convergence_suite(c);
  CHECK(r.passed);
  CHECK(r.rows.size() == 36);
  for (const auto& row : r.rows)
    if (row.n == 5000) CHECK(row.freq <= 0.05);
}

TEST_CASE("identity and inequality suites") {
  ExperimentConfig c;
  c.suite = Suite::Identities;
  c.random_params = true;
  c.n_grid = {500};
  c.replications = 1000;
  const auto id = run_identity_suite(c);
  CHECK(id.passed);
  for (const auto& row : id.rows) {
    CAPTURE(row.identity);
    if (!row.report_only) CHECK(row.max_residual <= row.tolerance);
  }
  c.suite = Suite::Inequalities;
  const auto in = run_inequality_suite(c);
  CHECK(in.passed);
  for (const auto& row : in.rows) CHECK(row.violations == 0);
}

TEST_CASE("suites are independent of the worker count") {
  ExperimentConfig c;
  c.suite = Suite::Deviations;
  c.n_grid = {100, 300};
  c.replications = 3000;
  const auto a = run_deviation_suite(c);
  c.workers = 8;
  const auto b = run_deviation_suite(c);
  REQUIRE(a.estimates.size() == b.estimates.size());
  for (std::size_t i = 0; i < a.estimates.size(); ++i) {
    CHECK(a.estimates[i].exceedances == b.estimates[i].exceedances);
    CHECK(a.estimates[i].r_n == b.estimates[i].r_n);
  }
}
