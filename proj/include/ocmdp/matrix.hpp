#pragma once

#include <string>
#include <vector>

#include "ocmdp/metrics.hpp"

namespace ocmdp {

struct RunSpec {
  std::string group;  // experiment cell, e.g. "T2000"
  RunConfig cfg;
};

struct RunResult {
  std::string group;
  long long T = 0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  MetricsSummary metrics;
  double wall_seconds = 0.0;
};

/// Declarative pass/fail checks evaluated over the grid.
///   slope_max:           log-log slope of the per-T median of `metric`
///   fraction_min:        fraction of runs whose boolean `metric` holds
///   reward_fraction_min: median cum_reward / ((rho/(1+rho)) T OPT)
///   value_max:           median of `metric`
struct CriterionSpec {
  std::string name;
  std::string kind;
  std::string metric;
  double target = 0.0;
  std::string group_prefix;  // empty = all groups
  bool required = true;
};

struct CriterionResult {
  std::string name;
  std::string kind;
  double target = 0.0;
  double measured = 0.0;
  bool pass = false;
};

struct ExperimentConfig {
  std::string name;
  std::vector<RunSpec> runs;
  std::vector<CriterionSpec> criteria;
  bool write_run_csv = true;
};

struct ExperimentReport {
  std::string name;
  std::vector<RunResult> runs;
  std::vector<CriterionResult> criteria;
  bool all_required_pass = true;
};

// Executes the grid (fanning out across `workers` threads), computes per-run
// metrics against per-run offline oracles, evaluates the criteria, and, when
// out_dir is nonempty, writes per-run trace CSVs plus report.json.
ExperimentReport run_matrix(const ExperimentConfig& cfg,
                            const std::string& out_dir, int workers = 1);

std::string report_json(const ExperimentReport& report);

double metric_value(const MetricsSummary& s, const std::string& name);
bool metric_flag(const MetricsSummary& s, const std::string& name);

}  // namespace ocmdp
