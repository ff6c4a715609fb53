#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ocmdp/offline.hpp"
#include "ocmdp/orchestrator.hpp"

namespace ocmdp {

// (L/sqrt(2)) sqrt(T ln(2/delta)).
double azuma_reward_bound(int horizon, long long T, double delta);
// 2L sqrt(2 (t2-t1+1) ln(T^2/delta)).
double azuma_constraint_bound(int horizon, long long T, int window_len,
                              double delta);

// Non-overlapping blocks of every power-of-two length (tail blocks included)
// plus the full range; 1-based inclusive windows.
std::vector<std::pair<int, int>> dyadic_windows(int T);

struct MetricsSummary {
  // Regret and reward (Def.-3 baseline T * OPT).
  double regret = 0.0;              // T*OPT - sum r_t' q_t
  double regret_mean_reward = 0.0;  // T*OPT - sum rbar' q_t
  double cum_reward = 0.0;          // sum r_t' q_t
  double cum_reward_realized = 0.0;

  // Cumulative violation: literal signed max over constraints, and the
  // positive-part diagnostic that cannot hide within-run violations.
  double violation_signed = 0.0;
  double violation_pos = 0.0;

  double lambda_max_l1 = 0.0;
  double dual_regret_zero = 0.0;  // OGD regret against the zero multiplier

  // Interval regret against q* over the dyadic grid, measured on realized
  // occupancies and on the learner's iterates: the overall max plus the max
  // per window length (index i = windows of length 2^i).
  double max_window_regret_qstar = 0.0;
  double max_window_regret_qstar_hat = 0.0;
  std::vector<double> window_regret_qstar_by_level;

  double azuma_reward_margin = 0.0;
  double azuma_reward_bound_value = 0.0;
  bool azuma_reward_ok = true;
  double azuma_constraint_max_ratio = 0.0;  // margin over bound, worst window
  bool azuma_constraint_ok = true;

  bool coverage_ok = true;  // true kernel inside every epoch's confidence set
  bool lambda_le_zeta = false;
  bool lambda_le_cap = false;

  int epochs = 0;
  double proj_residual_max = 0.0;

  // Oracle echoes
  double opt = 0.0;
  double rho = 0.0;
  std::optional<double> zeta;
  double condition2_threshold_value = 0.0;
  bool condition2_holds = false;
  double dual_cap = 0.0;
};

MetricsSummary compute_metrics(const RunTrace& trace, const OracleReport& oracle);

struct GrowthFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
};

// Least squares of ln(value) on ln(T); values are floored at 1 first.
// Throws ValidationError with fewer than 3 checkpoints.
GrowthFit fit_growth(const std::vector<std::pair<double, double>>& checkpoints);

}  // namespace ocmdp
