#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "dwlab/asymptotics.hpp"
#include "dwlab/lab.hpp"
#include "dwlab/model.hpp"
#include "dwlab/statistics.hpp"

namespace dwlab {

/// Shortest decimal string that parses back to exactly `x`.
std::string format_double(double x);
double parse_double(std::string_view text);

/// `k,x,eps,v` with one row per index; v is empty at k = 0.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& is);

std::string ledger_csv_header();
std::string ledger_csv_row(const StatLedger& l);
nlohmann::json to_json(const StatLedger& l);

/// Summary fields with snake_case names plus the determinant audit.
nlohmann::json to_json(const Summary& s, const Params& p);

nlohmann::json to_json(const NoiseSpec& n);
NoiseSpec noise_from_json(const nlohmann::json& j, NoiseSpec defaults = {});

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Keys missing from `j` keep their value from `defaults`.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig defaults = {});

void write_csv(std::ostream& os, const CltResult& r);
void write_csv(std::ostream& os, const DeviationResult& r);
void write_csv(std::ostream& os, const ConvergenceResult& r);
void write_csv(std::ostream& os, const IdentityResult& r);
void write_csv(std::ostream& os, const InequalityResult& r);

nlohmann::json to_json(const CltResult& r);
nlohmann::json to_json(const DeviationResult& r);
nlohmann::json to_json(const ConvergenceResult& r);
nlohmann::json to_json(const IdentityResult& r);
nlohmann::json to_json(const InequalityResult& r);

}  // namespace dwlab
