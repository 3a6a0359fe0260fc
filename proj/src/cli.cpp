#include "dwlab/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <algorithm>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string_view>

#include <CLI11.hpp>

#include "dwlab/asymptotics.hpp"
#include "dwlab/io.hpp"

#ifndef DWLAB_VERSION
#define DWLAB_VERSION "0.0.0"
#endif
#ifndef DWLAB_GIT_DESCRIBE
#define DWLAB_GIT_DESCRIBE "unknown"
#endif

namespace fs = std::filesystem;

namespace dwlab {

std::string artifact_version() { return std::string(DWLAB_VERSION) + "+" + DWLAB_GIT_DESCRIBE; }

nlohmann::json to_json(const RunManifest& m) {
  nlohmann::json j = {
      {"command", m.command},
      {"config_echo", to_json(m.config_echo)},
      {"artifact_version", m.artifact_version},
      {"started_at", m.started_at},
      {"finished_at", m.finished_at},
      {"wall_clock_seconds", m.wall_clock_seconds},
      {"seed", m.config_echo.master_seed},
      {"output_paths", m.output_paths},
  };
  if (!m.input.empty()) j["input"] = m.input;
  return j;
}

RunManifest manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  try {
    m.command = j.at("command").get<std::string>();
    m.config_echo = config_from_json(j.at("config_echo"));
    m.input = j.value("input", std::string{});
    m.artifact_version = j.value("artifact_version", std::string{});
    m.started_at = j.value("started_at", std::string{});
    m.finished_at = j.value("finished_at", std::string{});
    m.wall_clock_seconds = j.value("wall_clock_seconds", 0.0);
    m.output_paths = j.value("output_paths", std::vector<std::string>{});
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

namespace {

/// A rejected flag value; printed as "<flag>: <message>".
struct UsageError : Error {
  UsageError(std::string flag, const std::string& message) : Error(flag + ": " + message), flag(std::move(flag)) {}
  std::string flag;
};

const std::vector<std::string_view> kCommands = {"simulate",    "estimate",     "summary",
                                                 "clt",         "deviations",   "convergence",
                                                 "identities",  "inequalities", "report"};

bool is_suite(std::string_view cmd) {
  return cmd == "clt" || cmd == "deviations" || cmd == "convergence" || cmd == "identities" || cmd == "inequalities";
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string fmt(double x) { return format_double(x); }

// Raw flag values; only flags that were actually given are applied on top of the config.
struct Flags {
  double theta = 0, rho = 0, sigma2 = 0, x0 = 0, eps0 = 0;
  std::string noise;
  double beta = 0, nu = 0;
  std::vector<std::string> n_grid;
  std::string n;
  double alpha = 0;
  std::vector<double> x;
  double z = 0, delta = 0, param_bound = 0;
  std::vector<std::string> statistics;
  std::size_t reps = 0, workers = 0;
  std::uint64_t seed = 0;
  bool burn_in = false, random_init = false, random_params = false;
  std::string out, config, input;
};

std::size_t parse_count(const std::string& flag, const std::string& text) {
  double v = 0;
  try {
    v = parse_double(text);
  } catch (const DomainError&) {
    throw UsageError(flag, "'" + text + "' is not a number; expected an integer >= 2");
  }
  if (!(v >= 2) || v != std::floor(v) || v > 1e15)
    throw UsageError(flag, "'" + text + "' is not an integer >= 2");
  return static_cast<std::size_t>(v);
}

void check_config(const ExperimentConfig& c, std::string_view cmd) {
  if (!c.random_params) {
    if (!(std::abs(c.params.theta) < 1)) throw UsageError("--theta", fmt(c.params.theta) + " is outside (-1, 1)");
    if (!(std::abs(c.params.rho) < 1)) throw UsageError("--rho", fmt(c.params.rho) + " is outside (-1, 1)");
  }
  if (!(c.params.sigma2 > 0)) throw UsageError("--sigma2", fmt(c.params.sigma2) + " must be > 0");
  if (!std::isfinite(c.params.x0)) throw UsageError("--x0", "must be finite");
  if (!std::isfinite(c.params.eps0)) throw UsageError("--eps0", "must be finite");
  if (c.noise.family == NoiseFamily::SymmetricWeibull && !(c.noise.beta > 0 && c.noise.beta < 1))
    throw UsageError("--beta", fmt(c.noise.beta) + " is outside (0, 1)");
  if (c.noise.family == NoiseFamily::StudentT && !(c.noise.nu > 2))
    throw UsageError("--nu", fmt(c.noise.nu) + " must be > 2");
  if (c.n_grid.empty()) throw UsageError("--n-grid", "needs at least one value");
  for (std::size_t i = 0; i < c.n_grid.size(); ++i) {
    if (c.n_grid[i] < 2) throw UsageError("--n-grid", "every n must be >= 2");
    if (i > 0 && c.n_grid[i] <= c.n_grid[i - 1]) throw UsageError("--n-grid", "values must be strictly increasing");
  }
  if (!(c.alpha > 0 && c.alpha < 0.5)) throw UsageError("--alpha", fmt(c.alpha) + " is outside (0, 0.5)");
  for (double x : c.thresholds)
    if (!(x > 0)) throw UsageError("--x", fmt(x) + " must be > 0");
  if (!(c.z > 0)) throw UsageError("--z", fmt(c.z) + " must be > 0");
  if (!(c.delta > 0)) throw UsageError("--delta", fmt(c.delta) + " must be > 0");
  if (is_suite(cmd) && c.replications < 100)
    throw UsageError("--reps", std::to_string(c.replications) + " must be >= 100");
  if (c.workers < 1) throw UsageError("--workers", "must be >= 1");
  if (c.random_params) {
    if (!(c.param_bound > 0 && c.param_bound < 1))
      throw UsageError("--param-bound", fmt(c.param_bound) + " is outside (0, 1)");
    if (cmd != "identities" && cmd != "inequalities")
      throw UsageError("--random-params", "only valid for identities and inequalities");
  }
  if (cmd == "deviations" && c.statistics.empty()) throw UsageError("--statistics", "needs at least one of theta,rho,dw");
}

struct Invocation {
  std::string command;
  ExperimentConfig cfg;
  std::string out_dir;
  std::string input;
};

ExperimentConfig base_config(std::string_view cmd) {
  ExperimentConfig c;
  if (is_suite(cmd)) c.suite = parse_suite(cmd);
  if (cmd == "identities" || cmd == "inequalities") c.random_params = true;
  if (const char* env = std::getenv("DWLAB_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      c.master_seed = std::stoull(env, &used);
      if (env[used] != '\0') throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw UsageError("DWLAB_SEED", std::string("'") + env + "' is not an unsigned integer");
    }
  }
  return c;
}

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig defaults) {
  std::ifstream in(path);
  if (!in) throw UsageError("--config", "cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("--config", std::string("'") + path + "' is not valid JSON: " + e.what());
  }
  try {
    return config_from_json(j, defaults);
  } catch (const DomainError& e) {
    throw UsageError("--config", e.what());
  }
}

/// Parses flags for `cmd`; returns nullopt after printing help.
std::optional<Invocation> parse_invocation(const std::string& cmd, const std::vector<std::string>& rest,
                                           std::ostream& out) {
  CLI::App app("dwlab " + cmd, "dwlab " + cmd);
  Flags f;
  std::map<std::string, CLI::Option*> o;
  o["theta"] = app.add_option("--theta", f.theta, "AR coefficient of X, in (-1, 1)");
  o["rho"] = app.add_option("--rho", f.rho, "AR coefficient of the noise, in (-1, 1)");
  o["sigma2"] = app.add_option("--sigma2", f.sigma2, "innovation variance, > 0");
  o["x0"] = app.add_option("--x0", f.x0, "initial value X_0");
  o["eps0"] = app.add_option("--eps0", f.eps0, "initial noise eps_0");
  o["noise"] = app.add_option("--noise", f.noise, "gaussian, weibull or studentt");
  o["beta"] = app.add_option("--beta", f.beta, "Weibull shape, in (0, 1)");
  o["nu"] = app.add_option("--nu", f.nu, "Student t degrees of freedom, > 2");
  o["n-grid"] = app.add_option("--n-grid", f.n_grid, "comma separated, strictly increasing")->delimiter(',');
  o["n"] = app.add_option("--n", f.n, "path length (simulate)");
  o["alpha"] = app.add_option("--alpha", f.alpha, "speed exponent, b_n = n^alpha, in (0, 0.5)");
  o["x"] = app.add_option("--x", f.x, "deviation thresholds, comma separated")->delimiter(',');
  o["z"] = app.add_option("--z", f.z, "standardised threshold x b_n / sigma when --x is absent");
  o["delta"] = app.add_option("--delta", f.delta, "convergence tolerance");
  o["statistics"] = app.add_option("--statistics", f.statistics, "subset of theta,rho,dw")->delimiter(',');
  o["reps"] = app.add_option("--reps", f.reps, "replications per grid point");
  o["seed"] = app.add_option("--seed", f.seed, "master seed (default: $DWLAB_SEED or 42)");
  o["workers"] = app.add_option("--workers", f.workers, "worker threads");
  o["burn-in"] = app.add_flag("--burn-in", f.burn_in, "discard a warm-up segment");
  o["random-init"] = app.add_flag("--random-init", f.random_init, "draw X_0, eps_0 per replication");
  o["random-params"] = app.add_flag("--random-params", f.random_params, "draw (theta, rho) per replication");
  o["fixed-params"] = app.add_flag("--fixed-params", "use --theta/--rho for every replication");
  o["param-bound"] = app.add_option("--param-bound", f.param_bound, "bound for random (theta, rho)");
  app.add_option("--out", f.out, "output directory");
  app.add_option("--config", f.config, "JSON config or manifest.json");
  app.add_option("--input", f.input, "trajectory CSV (estimate) or run directory (report)");

  std::vector<std::string> reversed(rest.rbegin(), rest.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.get_name(), e.what());
  }

  Invocation inv{cmd, base_config(cmd), f.out, f.input};
  if (!f.config.empty()) inv.cfg = load_config_file(f.config, inv.cfg);
  if (is_suite(cmd)) inv.cfg.suite = parse_suite(cmd);
  auto given = [&](const char* name) { return o.at(name)->count() > 0; };
  ExperimentConfig& c = inv.cfg;
  if (given("theta")) c.params.theta = f.theta;
  if (given("rho")) c.params.rho = f.rho;
  if (given("sigma2")) c.params.sigma2 = f.sigma2;
  if (given("x0")) c.params.x0 = f.x0;
  if (given("eps0")) c.params.eps0 = f.eps0;
  if (given("noise")) {
    try {
      c.noise.family = parse_noise_family(f.noise);
    } catch (const DomainError&) {
      throw UsageError("--noise", "'" + f.noise + "' is not one of gaussian, weibull, studentt");
    }
  }
  if (given("beta")) c.noise.beta = f.beta;
  if (given("nu")) c.noise.nu = f.nu;
  if (given("n-grid")) {
    c.n_grid.clear();
    for (const auto& s : f.n_grid) c.n_grid.push_back(parse_count("--n-grid", s));
  }
  if (given("n")) c.n_grid = {parse_count("--n", f.n)};
  if (given("alpha")) c.alpha = f.alpha;
  if (given("x")) c.thresholds = f.x;
  if (given("z")) c.z = f.z;
  if (given("delta")) c.delta = f.delta;
  if (given("statistics")) {
    c.statistics.clear();
    for (const auto& s : f.statistics) {
      try {
        c.statistics.push_back(parse_statistic(s));
      } catch (const DomainError&) {
        throw UsageError("--statistics", "'" + s + "' is not one of theta, rho, dw");
      }
    }
  }
  if (given("reps")) c.replications = f.reps;
  if (given("seed")) c.master_seed = f.seed;
  if (given("workers")) c.workers = f.workers;
  if (given("burn-in")) c.burn_in = f.burn_in;
  if (given("random-init")) c.random_init = f.random_init;
  if (given("random-params")) c.random_params = true;
  if (given("fixed-params")) c.random_params = false;
  if (given("param-bound")) c.param_bound = f.param_bound;
  if (given("random-params") && given("fixed-params"))
    throw UsageError("--random-params", "cannot be combined with --fixed-params");

  if (cmd == "simulate" && !given("n") && !given("n-grid") && f.config.empty())
    throw UsageError("--n", "required for simulate (integer >= 2)");
  if (cmd == "simulate" && c.n_grid.size() != 1) throw UsageError("--n", "simulate takes a single path length");
  if (cmd == "estimate" && inv.input.empty()) throw UsageError("--input", "required: path to a k,x,eps,v CSV");
  if (cmd == "report" && inv.input.empty()) throw UsageError("--input", "required: a run directory with manifest.json");
  if (cmd != "report") {
    check_config(c, cmd);
    try {
      if (is_suite(cmd)) validate_config(c);
    } catch (const Error& e) {
      throw UsageError("config", e.what());
    }
  }
  if (inv.out_dir.empty())
    inv.out_dir = cmd == "report" ? (fs::path(inv.input) / "replay").string() : (fs::path("dwlab-runs") / cmd).string();
  return inv;
}

// ---------------------------------------------------------------------------

struct Outputs {
  fs::path dir;
  std::vector<std::string> paths;

  void write(const std::string& name, const std::string& content) {
    const fs::path p = dir / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error("cannot write '" + p.string() + "'");
    f << content;
    paths.push_back(p.string());
  }
};

template <typename Result>
std::string csv_of(const Result& r) {
  std::ostringstream os;
  write_csv(os, r);
  return os.str();
}

std::string json_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }

void print_params(std::ostream& out, const ExperimentConfig& c) {
  if (c.random_params)
    out << "params: random (theta, rho) in (-" << fmt(c.param_bound) << ", " << fmt(c.param_bound) << ")";
  else
    out << "params: theta=" << fmt(c.params.theta) << " rho=" << fmt(c.params.rho);
  out << " sigma2=" << fmt(c.params.sigma2) << " noise=" << to_string(c.noise.family) << " seed=" << c.master_seed
      << "\n";
}

int cmd_summary(const Invocation& inv, Outputs& io, std::ostream& out) {
  const auto& p = inv.cfg.params;
  const auto s = summary(p);
  const auto det = det_gamma_audit(s, p);
  const std::vector<std::pair<std::string, double>> rows = {
      {"theta_star", s.theta_star},     {"sigma2_theta", s.sigma2_theta},
      {"rho_star", s.rho_star},         {"sigma2_rho", s.sigma2_rho},
      {"d_star", s.d_star},             {"sigma2_d", s.sigma2_d},
      {"ell", s.ell},                   {"ell1", s.ell1},
      {"ell2", s.ell2},                 {"t_limit", s.t_limit},
      {"j_limit", s.j_limit},           {"gamma_cov", s.gamma(0, 1)},
      {"det_gamma_direct", det.direct}, {"det_gamma_printed_formula", det.printed},
      {"det_gamma_closed_form", det.closed_form},
  };
  std::ostringstream csv;
  csv << "quantity,value\n";
  for (const auto& [name, v] : rows) csv << name << ',' << fmt(v) << '\n';
  io.write("summary.csv", csv.str());
  io.write("summary.json", json_text(to_json(s, p)));
  print_params(out, inv.cfg);
  for (const auto& [name, v] : rows) out << std::left << std::setw(28) << name << std::setprecision(10) << v << "\n";
  return kExitOk;
}

int cmd_simulate(const Invocation& inv, Outputs& io, std::ostream& out) {
  const auto& c = inv.cfg;
  const auto traj = simulate(c.params, c.noise, c.n_grid.front(), Substream{c.master_seed, 0});
  std::ostringstream csv;
  write_trajectory_csv(csv, traj);
  io.write("simulate.csv", csv.str());
  const auto l = ledger(traj, c.params);
  io.write("summary.json", json_text({{"n", traj.n()}, {"ledger", to_json(l)}}));
  print_params(out, c);
  out << "simulated n=" << traj.n() << "  theta_hat=" << fmt(l.theta_hat) << "  rho_hat=" << fmt(l.rho_hat)
      << "  dw=" << fmt(l.dw) << "\n";
  return kExitOk;
}

int cmd_estimate(const Invocation& inv, Outputs& io, std::ostream& out) {
  std::ifstream in(inv.input);
  if (!in) throw UsageError("--input", "cannot open '" + inv.input + "'");
  Trajectory traj;
  try {
    traj = read_trajectory_csv(in);
  } catch (const DomainError& e) {
    throw UsageError("--input", e.what());
  }
  const auto l = ledger(traj, inv.cfg.params);
  io.write("estimate.csv", ledger_csv_header() + "\n" + ledger_csv_row(l) + "\n");
  const auto j = to_json(l);
  io.write("summary.json", json_text(j));
  out << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_suite(const Invocation& inv, Outputs& io, std::ostream& out) {
  const auto& c = inv.cfg;
  print_params(out, c);
  bool passed = true;
  auto emit = [&](const auto& r) {
    io.write(inv.command + ".csv", csv_of(r));
    auto j = to_json(r);
    io.write("summary.json", json_text(j));
    passed = r.passed;
  };
  switch (c.suite) {
    case Suite::Clt: {
      const auto r = run_clt_suite(c);
      emit(r);
      for (const auto& row : r.rows)
        out << "n=" << row.n << "  " << std::left << std::setw(14) << row.quantity << " est=" << std::setw(12)
            << std::setprecision(6) << row.estimate << " target=" << std::setw(12) << row.target << " "
            << (row.check == "report" ? "report" : row.pass ? "ok" : "FAIL") << "\n";
      break;
    }
    case Suite::Deviations: {
      const auto r = run_deviation_suite(c);
      emit(r);
      for (const auto& e : r.estimates)
        out << std::left << std::setw(6) << to_string(e.statistic) << "n=" << std::setw(8) << e.n
            << " x=" << std::setw(10) << std::setprecision(5) << e.x << " events=" << std::setw(8) << e.exceedances
            << " r_n/I=" << std::setw(8) << e.ratio_rate() << " r_n/gauss=" << std::setw(8) << e.ratio_gauss()
            << (e.insufficient_events ? " insufficient-events" : "") << "\n";
      out << "band " << (r.band_ok ? "ok" : "FAIL") << ", trend " << (r.trend_ok ? "ok" : "FAIL") << ", mapping "
          << (r.mapping_ok ? "ok" : "FAIL") << (r.checks_applied ? "" : " (report only for this noise)") << "\n";
      break;
    }
    case Suite::Convergence: {
      const auto r = run_convergence_suite(c);
      emit(r);
      for (const auto& row : r.rows)
        out << "n=" << std::left << std::setw(8) << row.n << std::setw(10) << row.functional
            << " freq=" << std::setw(10) << std::setprecision(4) << row.freq << (row.monotone ? "" : " FAIL") << "\n";
      break;
    }
    case Suite::Identities: {
      const auto r = run_identity_suite(c);
      emit(r);
      for (const auto& row : r.rows)
        out << std::left << std::setw(28) << row.identity << " max=" << std::setw(12) << std::setprecision(4)
            << row.max_residual << " tol=" << std::setw(8) << row.tolerance << " "
            << (row.report_only ? "report" : row.pass ? "ok" : "FAIL") << "\n";
      break;
    }
    case Suite::Inequalities: {
      const auto r = run_inequality_suite(c);
      emit(r);
      for (const auto& row : r.rows)
        out << std::left << std::setw(16) << row.inequality << " paths=" << row.paths
            << " violations=" << row.violations << " max_ratio=" << std::setprecision(4) << row.max_ratio << "\n";
      break;
    }
  }
  out << (passed ? "PASS" : "FAIL") << "\n";
  return passed ? kExitOk : kExitSuiteFailure;
}

int execute(const Invocation& inv, std::ostream& out);

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int cmd_report(const Invocation& inv, std::ostream& out) {
  const fs::path dir(inv.input);
  std::ifstream in(dir / "manifest.json");
  if (!in) throw UsageError("--input", "no manifest.json in '" + inv.input + "'");
  RunManifest m;
  try {
    nlohmann::json j;
    in >> j;
    m = manifest_from_json(j);
  } catch (const std::exception& e) {
    throw UsageError("--input", e.what());
  }
  Invocation replay{m.command, m.config_echo, inv.out_dir, m.input};
  if (inv.cfg.workers != ExperimentConfig{}.workers) replay.cfg.workers = inv.cfg.workers;
  std::ostringstream sink;
  const int code = execute(replay, sink);
  out << "replayed '" << m.command << "' from " << (dir / "manifest.json").string() << " with workers="
      << replay.cfg.workers << " (exit " << code << ")\n";
  bool identical = true;
  for (const auto& original : m.output_paths) {
    const fs::path name = fs::path(original).filename();
    if (name == "manifest.json") continue;
    const bool same = read_file(dir / name) == read_file(fs::path(inv.out_dir) / name);
    identical = identical && same;
    out << std::left << std::setw(20) << name.string() << (same ? "identical" : "DIFFERS") << "\n";
  }
  out << (identical ? "REPRODUCED" : "NOT REPRODUCED") << "\n";
  return identical ? kExitOk : kExitSuiteFailure;
}

int execute(const Invocation& inv, std::ostream& out) {
  if (inv.command == "report") return cmd_report(inv, out);
  fs::create_directories(inv.out_dir);
  Outputs io{inv.out_dir, {}};
  RunManifest m;
  m.command = inv.command;
  m.config_echo = inv.cfg;
  m.input = inv.input;
  m.artifact_version = artifact_version();
  m.started_at = timestamp_utc();
  const auto t0 = std::chrono::steady_clock::now();
  int code = kExitOk;
  if (inv.command == "summary")
    code = cmd_summary(inv, io, out);
  else if (inv.command == "simulate")
    code = cmd_simulate(inv, io, out);
  else if (inv.command == "estimate")
    code = cmd_estimate(inv, io, out);
  else
    code = cmd_suite(inv, io, out);
  m.finished_at = timestamp_utc();
  m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  m.output_paths = io.paths;
  m.output_paths.push_back((io.dir / "manifest.json").string());
  std::ofstream(io.dir / "manifest.json") << json_text(to_json(m));
  out << "wrote " << inv.out_dir << "\n";
  return code;
}

void print_usage(std::ostream& os) {
  os << "usage: dwlab <command> [flags]\n\ncommands:\n"
        "  simulate      simulate one path (--n) and export it as k,x,eps,v CSV\n"
        "  estimate      ledger of estimators for a trajectory CSV (--input)\n"
        "  summary       closed-form limits, variances and rates\n"
        "  clt           Monte Carlo check of the asymptotic variances\n"
        "  deviations    moderate deviation rates\n"
        "  convergence   deviation frequencies of the ledger functionals\n"
        "  identities    algebraic identities on random paths\n"
        "  inequalities  almost-sure bounds on random paths\n"
        "  report        replay a run directory (--input) and compare outputs\n\n"
        "run 'dwlab <command> --help' for flags\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.empty() || args[0] == "--help" || args[0] == "-h") {
    print_usage(args.empty() ? err : out);
    return args.empty() ? kExitUsage : kExitOk;
  }
  if (args[0] == "--version") {
    out << artifact_version() << "\n";
    return kExitOk;
  }
  const std::string& cmd = args[0];
  if (std::find(kCommands.begin(), kCommands.end(), cmd) == kCommands.end()) {
    err << "error: unknown command '" << cmd << "'\n";
    print_usage(err);
    return kExitUsage;
  }
  try {
    const auto inv = parse_invocation(cmd, {args.begin() + 1, args.end()}, out);
    if (!inv) return kExitOk;
    return execute(*inv, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InsufficientEventsError& e) {
    err << "error: " << e.what() << "\n";
    return kExitSuiteFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace dwlab
