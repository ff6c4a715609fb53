#pragma once

#include <string>

#include <json.hpp>

#include "ocmdp/matrix.hpp"

namespace ocmdp {

// JSON document schema (see README for the full reference):
//   cmdp:        layers (arrays of state names), actions, transitions as
//                nested maps state -> action -> successor -> probability
//   environment: m, rewards {regime, families|schedule},
//                constraints {regime, families|schedule}
//   algorithm:   T, delta, proj_tol, proj_max_iters, C, K, dual_eta
//   experiment:  name, T_grid, seeds, criteria
LoopFreeCmdp cmdp_from_json(const nlohmann::json& j);
nlohmann::json cmdp_to_json(const LoopFreeCmdp& p);

EnvironmentSpec environment_from_json(const nlohmann::json& j,
                                      const LayerLayout& shape,
                                      const std::string& base_dir = "");

struct FullConfig {
  LoopFreeCmdp cmdp;
  EnvironmentSpec env;
  long long T = 2;
  double delta = 0.1;
  AlgorithmOptions algo;
  nlohmann::json experiment;  // raw section; empty when absent
};

FullConfig config_from_json(const nlohmann::json& j,
                            const std::string& base_dir = "");
FullConfig load_config(const std::string& path);

// Experiment grid from the config's experiment section: T_grid x seeds over
// the config's cmdp/environment/algorithm, groups named "T<value>".
ExperimentConfig experiment_from_config(const FullConfig& cfg);

nlohmann::json summary_json(const RunTrace& trace, const OracleReport& oracle,
                            const MetricsSummary& metrics,
                            const nlohmann::json& config_echo);

}  // namespace ocmdp
