#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dwlab/cli.hpp"
#include "dwlab/io.hpp"

using namespace dwlab;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dwlab_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("summary prints the closed forms") {
  const auto dir = scratch("summary");
  const auto r = cli({"summary", "--theta", "0.5", "--rho", "0.3", "--sigma2", "1", "--out", dir.string()});
  CHECK(r.code == kExitOk);
  for (const char* key : {"theta_star", "rho_star", "d_star", "sigma2_theta", "sigma2_rho", "sigma2_d",
                          "det_gamma_direct", "det_gamma_printed_formula"})
    CHECK(r.out.find(key) != std::string::npos);
  CHECK(r.out.find("0.6956521739") != std::string::npos);
  CHECK(r.out.find("0.1903708557") != std::string::npos);
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(fs::exists(dir / "summary.csv"));
  const auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(j["sigma2_theta"].get<double>() == doctest::Approx(0.38144160433960713));
}

TEST_CASE("estimate reproduces the in-process ledger bit for bit") {
  const auto sim = scratch("sim");
  REQUIRE(cli({"simulate", "--n", "500", "--seed", "9", "--x0", "0.5", "--out", sim.string()}).code == kExitOk);
  const auto est = scratch("est");
  const auto r = cli({"estimate", "--input", (sim / "simulate.csv").string(), "--out", est.string()});
  REQUIRE(r.code == kExitOk);

  ExperimentConfig c;
  c.params.x0 = 0.5;
  const auto t = simulate(c.params, c.noise, 500, Substream{9, 0});
  const auto l = ledger(t, c.params);
  const auto j = nlohmann::json::parse(slurp(est / "summary.json"));
  CHECK(j["theta_hat"].get<double>() == l.theta_hat);
  CHECK(j["dw"].get<double>() == l.dw);
  CHECK(slurp(est / "estimate.csv") == ledger_csv_header() + "\n" + ledger_csv_row(l) + "\n");
}

TEST_CASE("identities twice gives identical files") {
  const auto a = scratch("id_a"), b = scratch("id_b");
  REQUIRE(cli({"identities", "--reps", "1000", "--seed", "42", "--out", a.string()}).code == kExitOk);
  REQUIRE(cli({"identities", "--reps", "1000", "--seed", "42", "--out", b.string()}).code == kExitOk);
  CHECK(slurp(a / "identities.csv") == slurp(b / "identities.csv"));
  CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
  CHECK(!slurp(a / "identities.csv").empty());
}

TEST_CASE("manifest replay reproduces outputs with a different worker count") {
  const auto dir = scratch("dev");
  const auto first = cli({"deviations", "--n-grid", "100,400", "--reps", "2000", "--seed", "5", "--workers", "1",
                          "--out", dir.string()});
  REQUIRE(first.code == kExitOk);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["config_echo"]["n_grid"] == nlohmann::json::array({100, 400}));
  CHECK(manifest.contains("artifact_version"));
  CHECK(manifest["output_paths"].size() == 3);

  const auto again = scratch("dev_again");
  CHECK(cli({"deviations", "--config", (dir / "manifest.json").string(), "--workers", "8", "--out", again.string()})
            .code == kExitOk);
  CHECK(slurp(dir / "deviations.csv") == slurp(again / "deviations.csv"));

  const auto report = cli({"report", "--input", dir.string(), "--workers", "8"});
  CHECK(report.code == kExitOk);
  CHECK(report.out.find("REPRODUCED") != std::string::npos);
}

TEST_CASE("manifest config echo round trips") {
  RunManifest m;
  m.command = "clt";
  m.config_echo.suite = Suite::Clt;
  m.config_echo.params.theta = 0.123456789012345;
  m.config_echo.master_seed = 18446744073709551615ull;
  m.output_paths = {"a.csv"};
  const auto back = manifest_from_json(nlohmann::json::parse(to_json(m).dump()));
  CHECK(back.config_echo == m.config_echo);
  CHECK(back.command == "clt");
}

TEST_CASE("validation errors name the flag and exit with 2") {
  auto r = cli({"deviations", "--alpha", "0.5", "--out", scratch("bad").string()});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("--alpha") != std::string::npos);
  CHECK(r.err.find("(0, 0.5)") != std::string::npos);
  CHECK_FALSE(fs::exists(scratch("bad")));

  r = cli({"clt", "--theta", "1.0"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("--theta") != std::string::npos);

  r = cli({"clt", "--noise", "cauchy"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("--noise") != std::string::npos);

  r = cli({"simulate"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("--n") != std::string::npos);

  r = cli({"convergence", "--n-grid", "1000,100"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("--n-grid") != std::string::npos);

  r = cli({"clt", "--reps", "ten"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("--reps") != std::string::npos);

  r = cli({"frobnicate"});
  CHECK(r.code == kExitUsage);
  CHECK(cli({}).code == kExitUsage);
}

TEST_CASE("suite failure exits with 3") {
  // Far too few replications for any tail events at this threshold.
  const auto r = cli({"deviations", "--n-grid", "500", "--reps", "200", "--z", "4.5", "--statistics", "theta",
                      "--out", scratch("fail").string()});
  CHECK(r.code == kExitSuiteFailure);
  CHECK(r.out.find("FAIL") != std::string::npos);
}

TEST_CASE("seed precedence: flag over config over environment") {
  const auto cfg = scratch("cfg");
  fs::create_directories(cfg);
  std::ofstream(cfg / "c.json") << R"({"seed": 11, "noise": {"family": "weibull", "beta": 0.4}})";

  ::setenv("DWLAB_SEED", "7", 1);
  auto seed_of = [](const fs::path& dir) {
    return nlohmann::json::parse(slurp(dir / "manifest.json"))["config_echo"]["seed"].get<std::uint64_t>();
  };
  REQUIRE(cli({"summary", "--out", (cfg / "env").string()}).code == kExitOk);
  CHECK(seed_of(cfg / "env") == 7);
  REQUIRE(cli({"summary", "--config", (cfg / "c.json").string(), "--out", (cfg / "file").string()}).code == kExitOk);
  CHECK(seed_of(cfg / "file") == 11);
  REQUIRE(cli({"summary", "--config", (cfg / "c.json").string(), "--seed", "13", "--out", (cfg / "flag").string()})
              .code == kExitOk);
  CHECK(seed_of(cfg / "flag") == 13);
  const auto echo = nlohmann::json::parse(slurp(cfg / "flag" / "manifest.json"))["config_echo"];
  CHECK(echo["noise"]["family"] == "weibull");
  CHECK(echo["noise"]["beta"].get<double>() == 0.4);
  ::unsetenv("DWLAB_SEED");
}

TEST_CASE("the executable reports exit codes") {
  const std::string bin = DWLAB_BINARY;
  CHECK(std::system((bin + " summary --out " + scratch("exe").string() + " > /dev/null").c_str()) == 0);
  const int bad = std::system((bin + " deviations --alpha 0.5 2> /dev/null").c_str());
  CHECK(WEXITSTATUS(bad) == 2);
}
