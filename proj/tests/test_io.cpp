#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <sstream>

#include "dwlab/io.hpp"

using namespace dwlab;

TEST_CASE("shortest round-trip formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-300) == "1e-300");
  CHECK(format_double(-2.5) == "-2.5");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(std::isnan(parse_double("nan")));
  std::mt19937_64 gen(1);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int i = 0; i < 100000; ++i) {
    const std::uint64_t b = bits(gen);
    double x;
    std::memcpy(&x, &b, sizeof x);
    if (!std::isfinite(x)) continue;
    CHECK(parse_double(format_double(x)) == x);
  }
  CHECK_THROWS_AS(parse_double("1.5x"), DomainError);
}

TEST_CASE("trajectory csv round trip is exact") {
  const Params p{0.5, 0.3, 1.0, 0.25, -1.0};
  const auto t = simulate(p, {}, 300, Substream{4, 4});
  std::stringstream ss;
  write_trajectory_csv(ss, t);
  const auto back = read_trajectory_csv(ss);
  CHECK(back.x == t.x);
  CHECK(back.eps == t.eps);
  CHECK(back.v == t.v);
  CHECK(ledger(back, p) == ledger(t, p));
}

TEST_CASE("trajectory csv layout") {
  const auto t = propagate(Params{0.5, 0.0, 1.0, 1.0, 0.0}, std::vector<double>{0.0, 1.0});
  std::stringstream ss;
  write_trajectory_csv(ss, t);
  CHECK(ss.str() == "k,x,eps,v\n0,1,0,\n1,0.5,0,0\n2,1.25,1,1\n");
}

TEST_CASE("malformed trajectory csv") {
  std::stringstream bad_header("a,b,c\n0,1,0,\n");
  CHECK_THROWS_AS(read_trajectory_csv(bad_header), DomainError);
  std::stringstream gap("k,x,eps,v\n0,1,0,\n2,1,0,1\n");
  CHECK_THROWS_AS(read_trajectory_csv(gap), DomainError);
  std::stringstream missing_v("k,x,eps,v\n0,1,0,\n1,1,0,\n");
  CHECK_THROWS_AS(read_trajectory_csv(missing_v), DomainError);
}

TEST_CASE("ledger encodings share field names") {
  const Params p{0.5, 0.3, 1.0};
  const auto l = ledger(simulate(p, {}, 100, Substream{1, 1}), p);
  const auto header = ledger_csv_header();
  const auto j = to_json(l);
  std::stringstream hs(header);
  std::string name;
  std::size_t count = 0;
  while (std::getline(hs, name, ',')) {
    CHECK(j.contains(name));
    ++count;
  }
  CHECK(count == j.size());
  CHECK(j["theta_hat"].get<double>() == l.theta_hat);
}

TEST_CASE("config json round trip") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-0.99, 0.99);
  for (int i = 0; i < 200; ++i) {
    ExperimentConfig c;
    c.params = {u(gen), u(gen), 1.0 + u(gen), u(gen), u(gen)};
    c.noise.family = static_cast<NoiseFamily>(i % 3);
    c.noise.beta = 0.5 + u(gen) / 4;
    c.noise.nu = 3 + std::abs(u(gen));
    c.n_grid = {100, static_cast<std::size_t>(1000 + i)};
    c.alpha = 0.25 + u(gen) / 5;
    if (i % 2) c.thresholds = {std::abs(u(gen)), 0.1 * i};
    c.z = 2 + u(gen);
    c.statistics = i % 4 ? std::vector<Statistic>{Statistic::Rho} : std::vector<Statistic>{};
    c.replications = 100 + i;
    c.master_seed = gen();
    c.workers = 1 + i % 5;
    c.suite = static_cast<Suite>(i % 5);
    c.delta = 0.1 + std::abs(u(gen));
    c.burn_in = i % 2;
    c.random_init = i % 3 == 0;
    c.random_params = i % 5 == 0;
    c.param_bound = 0.5 + std::abs(u(gen)) / 3;
    const auto text = to_json(c).dump();
    CHECK(config_from_json(nlohmann::json::parse(text)) == c);
  }
}

TEST_CASE("config keys override defaults") {
  const auto j = nlohmann::json::parse(R"({"theta": 0.1, "noise": {"family": "weibull", "beta": 0.3}})");
  const auto c = config_from_json(j);
  CHECK(c.params.theta == 0.1);
  CHECK(c.params.rho == ExperimentConfig{}.params.rho);
  CHECK(c.noise.family == NoiseFamily::SymmetricWeibull);
  CHECK(c.noise.beta == 0.3);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"theta": "x"})")), DomainError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"suite": "nope"})")), DomainError);
}

TEST_CASE("summary json") {
  const Params p{0.5, 0.3, 1.0};
  const auto j = to_json(summary(p), p);
  CHECK(j["theta_star"].get<double>() == doctest::Approx(0.69565217391304348));
  CHECK(j["det_gamma_printed_formula"].get<double>() == doctest::Approx(0.19037085574380393));
  CHECK(j["gamma"][0][1].get<double>() == j["gamma"][1][0].get<double>());
}
