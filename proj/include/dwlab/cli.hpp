#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "dwlab/lab.hpp"

namespace dwlab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitSuiteFailure = 3;

struct RunManifest {
  std::string command;
  ExperimentConfig config_echo;
  std::string input;  ///< trajectory path for `estimate`, empty otherwise
  std::string artifact_version;
  std::string started_at;
  std::string finished_at;
  double wall_clock_seconds = 0;
  std::vector<std::string> output_paths;
};

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

/// Version string written into manifests.
std::string artifact_version();

/// Entry point behind the `dwlab` executable. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dwlab
