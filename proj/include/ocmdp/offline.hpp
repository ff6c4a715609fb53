#pragma once

#include <optional>
#include <vector>

#include "ocmdp/environment.hpp"
#include "ocmdp/simplex.hpp"

namespace ocmdp {

// T^(-1/8) * L * sqrt(20 m), the margin Condition-2 asks of rho.
double condition2_threshold(long long T, int horizon, int m);

// 20 m L^2 / rho^2, the multiplier ceiling tied to the margin rho.
double zeta_value(int m, int horizon, double rho);

struct OracleReport {
  LpStatus opt_status = LpStatus::infeasible;
  double opt = 0.0;
  OccupancyMeasure q_star;

  // Best uniform safety margin and its witness q°.  In the adversarial
  // regime the margin is the worst case over the materialized schedule.
  double rho = 0.0;
  OccupancyMeasure q_margin;

  bool slater_holds = false;
  bool condition2_holds = false;
  double condition2_threshold_value = 0.0;
  std::optional<double> zeta;

  // rho/(1+rho) q* + 1/(1+rho) q°; adversarial constraints only.
  std::optional<OccupancyMeasure> q_mix;

  std::vector<double> mean_reward;       // pair-indexed
  std::vector<double> mean_constraints;  // row-major m x pairs
};

OracleReport solve_offline(const EnvironmentSpec& spec, const LoopFreeCmdp& p,
                           long long T);

// Gbar' q <= 0 rows in triple space, one per constraint, from a row-major
// (m x pairs) matrix.
std::vector<LinearRow> safety_rows(const LayerLayout& shape, int m,
                                   const std::vector<double>& g_matrix);

}  // namespace ocmdp
