#include "dwlab/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

namespace dwlab {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r' || text.back() == '\t')) text.remove_suffix(1);
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw DomainError("not a number: '" + std::string(text) + "'");
  return value;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "k,x,eps,v\n";
  for (std::size_t k = 0; k <= traj.n(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    os << k << ',' << format_double(traj.x(i)) << ',' << format_double(traj.eps(i)) << ',';
    if (k > 0) os << format_double(traj.innovation(k));
    os << '\n';
  }
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

Trajectory read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DomainError("trajectory csv is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "k,x,eps,v") throw DomainError("trajectory csv header must be 'k,x,eps,v', got '" + line + "'");
  std::vector<double> x, eps, v;
  std::size_t expected = 0;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 4) throw DomainError("trajectory row needs 4 cells: '" + line + "'");
    if (static_cast<std::size_t>(parse_double(cells[0])) != expected)
      throw DomainError("trajectory rows must be consecutive from k=0");
    x.push_back(parse_double(cells[1]));
    eps.push_back(parse_double(cells[2]));
    if (expected > 0) {
      if (cells[3].empty()) throw DomainError("innovation missing at k=" + std::to_string(expected));
      v.push_back(parse_double(cells[3]));
    }
    ++expected;
  }
  if (x.size() < 2) throw DomainError("trajectory needs at least two rows");
  Trajectory t;
  t.x = Eigen::Map<Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  t.eps = Eigen::Map<Eigen::VectorXd>(eps.data(), static_cast<Eigen::Index>(eps.size()));
  t.v = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  return t;
}

namespace {

// Field table shared by the CSV and JSON ledger encodings.
template <typename Fn>
void for_each_ledger_field(const StatLedger& l, Fn&& fn) {
  fn("n", static_cast<double>(l.n));
  fn("L_n", l.L_n);
  fn("M_n", l.M_n);
  fn("N_n", l.N_n);
  fn("Q_n", l.Q_n);
  fn("S_n", l.S_n);
  fn("S_nm1", l.S_nm1);
  fn("P_n", l.P_n);
  fn("J_n", l.J_n);
  fn("J_nm1", l.J_nm1);
  fn("theta_hat", l.theta_hat);
  fn("rho_hat", l.rho_hat);
  fn("dw", l.dw);
  fn("f_n", l.f_n);
  fn("T_n", l.T_n);
  fn("R_theta", l.R_theta);
  fn("T4_n", l.T4_n);
  fn("Gamma4_n", l.Gamma4_n);
  fn("resid0", l.resid0);
}

template <typename Row>
std::string join(const Row& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  return out;
}

}  // namespace

std::string ledger_csv_header() {
  std::vector<std::string> names;
  for_each_ledger_field(StatLedger{}, [&](const char* name, double) { names.emplace_back(name); });
  return join(names);
}

std::string ledger_csv_row(const StatLedger& l) {
  std::vector<std::string> cells;
  for_each_ledger_field(l, [&](const char* name, double value) {
    cells.push_back(std::string_view(name) == "n" ? std::to_string(l.n) : format_double(value));
  });
  return join(cells);
}

nlohmann::json to_json(const StatLedger& l) {
  nlohmann::json j;
  for_each_ledger_field(l, [&](const char* name, double value) {
    if (std::string_view(name) == "n")
      j[name] = l.n;
    else
      j[name] = value;
  });
  return j;
}

namespace {

nlohmann::json matrix_json(const Eigen::Matrix2d& m) {
  return nlohmann::json::array({{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}});
}

// JSON has no infinity; extended-real values are written as strings.
nlohmann::json extended(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

}  // namespace

nlohmann::json to_json(const Summary& s, const Params& p) {
  const auto det = det_gamma_audit(s, p);
  return {
      {"theta", p.theta},
      {"rho", p.rho},
      {"sigma2", p.sigma2},
      {"theta_star", s.theta_star},
      {"rho_star", s.rho_star},
      {"d_star", s.d_star},
      {"ell", s.ell},
      {"ell1", s.ell1},
      {"ell2", s.ell2},
      {"sigma2_theta", s.sigma2_theta},
      {"sigma2_rho", s.sigma2_rho},
      {"sigma2_d", s.sigma2_d},
      {"gamma", matrix_json(s.gamma)},
      {"lambda", matrix_json(s.lambda)},
      {"a_limit", matrix_json(s.a_limit)},
      {"t_limit", s.t_limit},
      {"j_limit", s.j_limit},
      {"det_gamma_direct", det.direct},
      {"det_gamma_printed_formula", det.printed},
      {"det_gamma_closed_form", det.closed_form},
  };
}

nlohmann::json to_json(const NoiseSpec& n) {
  nlohmann::json j = {{"family", std::string(to_string(n.family))}, {"satisfies_cl", n.satisfies_cl()}};
  if (n.family == NoiseFamily::SymmetricWeibull) j["beta"] = n.beta;
  if (n.family == NoiseFamily::StudentT) j["nu"] = n.nu;
  return j;
}

NoiseSpec noise_from_json(const nlohmann::json& j, NoiseSpec defaults) {
  NoiseSpec n = defaults;
  if (j.is_string()) {
    n.family = parse_noise_family(j.get<std::string>());
    return n;
  }
  if (j.contains("family")) n.family = parse_noise_family(j.at("family").get<std::string>());
  if (j.contains("beta")) n.beta = j.at("beta").get<double>();
  if (j.contains("nu")) n.nu = j.at("nu").get<double>();
  return n;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  std::vector<std::string> stats;
  for (auto s : c.statistics) stats.emplace_back(to_string(s));
  nlohmann::json noise = {{"family", std::string(to_string(c.noise.family))}, {"beta", c.noise.beta}, {"nu", c.noise.nu}};
  return {
      {"suite", std::string(to_string(c.suite))},
      {"theta", c.params.theta},
      {"rho", c.params.rho},
      {"sigma2", c.params.sigma2},
      {"x0", c.params.x0},
      {"eps0", c.params.eps0},
      {"noise", noise},
      {"n_grid", c.n_grid},
      {"alpha", c.alpha},
      {"x", c.thresholds},
      {"z", c.z},
      {"statistics", stats},
      {"reps", c.replications},
      {"seed", c.master_seed},
      {"workers", c.workers},
      {"delta", c.delta},
      {"burn_in", c.burn_in},
      {"random_init", c.random_init},
      {"random_params", c.random_params},
      {"param_bound", c.param_bound},
  };
}

ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig c) {
  if (!j.is_object()) throw DomainError("config must be a JSON object");
  const nlohmann::json& src = j.contains("config_echo") ? j.at("config_echo") : j;
  auto get = [&](const char* key, auto& field) {
    if (src.contains(key)) field = src.at(key).get<std::decay_t<decltype(field)>>();
  };
  try {
    if (src.contains("suite")) c.suite = parse_suite(src.at("suite").get<std::string>());
    get("theta", c.params.theta);
    get("rho", c.params.rho);
    get("sigma2", c.params.sigma2);
    get("x0", c.params.x0);
    get("eps0", c.params.eps0);
    if (src.contains("noise")) c.noise = noise_from_json(src.at("noise"), c.noise);
    get("n_grid", c.n_grid);
    get("alpha", c.alpha);
    get("x", c.thresholds);
    get("z", c.z);
    if (src.contains("statistics")) {
      c.statistics.clear();
      for (const auto& s : src.at("statistics")) c.statistics.push_back(parse_statistic(s.get<std::string>()));
    }
    get("reps", c.replications);
    get("seed", c.master_seed);
    get("workers", c.workers);
    get("delta", c.delta);
    get("burn_in", c.burn_in);
    get("random_init", c.random_init);
    get("random_params", c.random_params);
    get("param_bound", c.param_bound);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("bad config value: ") + e.what());
  }
  return c;
}

// ---------------------------------------------------------------------------

void write_csv(std::ostream& os, const CltResult& r) {
  os << "n,quantity,estimate,std_error,target,check,tolerance,pass\n";
  for (const auto& row : r.rows)
    os << row.n << ',' << row.quantity << ',' << format_double(row.estimate) << ',' << format_double(row.std_error)
       << ',' << format_double(row.target) << ',' << row.check << ',' << format_double(row.tolerance) << ','
       << (row.pass ? 1 : 0) << '\n';
}

void write_csv(std::ostream& os, const DeviationResult& r) {
  os << "statistic,n,b_n,x,exceedances,replications,p_hat,ci_low,ci_high,r_n,r_n_se,rate_target,gauss_oracle,"
        "ratio_rate,ratio_gauss,insufficient_events\n";
  for (const auto& e : r.estimates)
    os << to_string(e.statistic) << ',' << e.n << ',' << format_double(e.b_n) << ',' << format_double(e.x) << ','
       << e.exceedances << ',' << e.replications << ',' << format_double(e.p_hat) << ',' << format_double(e.ci_low)
       << ',' << format_double(e.ci_high) << ',' << format_double(e.r_n) << ',' << format_double(e.r_n_se) << ','
       << format_double(e.rate_target) << ',' << format_double(e.gauss_oracle) << ','
       << format_double(e.ratio_rate()) << ',' << format_double(e.ratio_gauss()) << ','
       << (e.insufficient_events ? 1 : 0) << '\n';
}

void write_csv(std::ostream& os, const ConvergenceResult& r) {
  os << "n,functional,target,delta,mean,freq,freq_se,decay,monotone\n";
  for (const auto& row : r.rows)
    os << row.n << ',' << row.functional << ',' << format_double(row.target) << ',' << format_double(row.delta) << ','
       << format_double(row.mean) << ',' << format_double(row.freq) << ',' << format_double(row.freq_se) << ','
       << format_double(row.decay) << ',' << (row.monotone ? 1 : 0) << '\n';
}

void write_csv(std::ostream& os, const IdentityResult& r) {
  os << "identity,max_residual,tolerance,evaluated,skipped,report_only,pass\n";
  for (const auto& row : r.rows)
    os << row.identity << ',' << format_double(row.max_residual) << ',' << format_double(row.tolerance) << ','
       << row.evaluated << ',' << row.skipped << ',' << (row.report_only ? 1 : 0) << ',' << (row.pass ? 1 : 0)
       << '\n';
}

void write_csv(std::ostream& os, const InequalityResult& r) {
  os << "inequality,paths,violations,max_ratio\n";
  for (const auto& row : r.rows)
    os << row.inequality << ',' << row.paths << ',' << row.violations << ',' << format_double(row.max_ratio) << '\n';
}

nlohmann::json to_json(const CltResult& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"n", row.n},
                    {"quantity", row.quantity},
                    {"estimate", row.estimate},
                    {"target", row.target},
                    {"pass", row.pass}});
  return {{"suite", "clt"}, {"passed", r.passed}, {"rows", rows}};
}

nlohmann::json to_json(const DeviationResult& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : r.estimates)
    rows.push_back({{"statistic", std::string(to_string(e.statistic))},
                    {"n", e.n},
                    {"x", e.x},
                    {"p_hat", e.p_hat},
                    {"r_n", extended(e.r_n)},
                    {"ratio_rate", extended(e.ratio_rate())},
                    {"ratio_gauss", extended(e.ratio_gauss())},
                    {"insufficient_events", e.insufficient_events}});
  return {{"suite", "deviations"},
          {"passed", r.passed},
          {"checks_applied", r.checks_applied},
          {"band_ok", r.band_ok},
          {"trend_ok", r.trend_ok},
          {"mapping_ok", r.mapping_ok},
          {"tail_convention",
           "p_hat estimates P(|Z| > x); r_n = -log(p_hat/2)/b_n^2 compares the per-tail probability with the "
           "one-sided normal tail in gauss_oracle"},
          {"rows", rows}};
}

nlohmann::json to_json(const ConvergenceResult& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"n", row.n}, {"functional", row.functional}, {"freq", row.freq}, {"monotone", row.monotone}});
  return {{"suite", "convergence"}, {"passed", r.passed}, {"rows", rows}};
}

nlohmann::json to_json(const IdentityResult& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"identity", row.identity},
                    {"max_residual", extended(row.max_residual)},
                    {"tolerance", row.tolerance},
                    {"report_only", row.report_only},
                    {"pass", row.pass}});
  return {{"suite", "identities"}, {"passed", r.passed}, {"rows", rows}};
}

nlohmann::json to_json(const InequalityResult& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"inequality", row.inequality},
                    {"paths", row.paths},
                    {"violations", row.violations},
                    {"max_ratio", row.max_ratio}});
  return {{"suite", "inequalities"}, {"passed", r.passed}, {"rows", rows}};
}

}  // namespace dwlab
