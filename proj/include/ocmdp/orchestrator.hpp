#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ocmdp/dual.hpp"
#include "ocmdp/environment.hpp"
#include "ocmdp/primal.hpp"

namespace ocmdp {

struct AlgorithmOptions {
  double proj_tol = 1e-7;
  int proj_max_iters = 100000;
  std::optional<double> C_override;         // primal step constant
  std::optional<double> K_override;         // dual rate constant
  std::optional<double> dual_eta_override;  // direct dual learning rate
};

struct RunConfig {
  LoopFreeCmdp cmdp;
  EnvironmentSpec env;
  long long T = 0;
  double delta = 0.1;
  std::uint64_t seed = 0;
  AlgorithmOptions algo;
};

struct EpisodeRecord {
  int t = 0;
  Trajectory traj;
  RewardSample reward;
  ConstraintSample constraints;
  std::vector<double> qhat;    // iterate played this episode (triples)
  std::vector<double> q_true;  // occupancy of pi_t under the true kernel
  std::vector<double> lambda;  // multipliers used to build the loss
  std::vector<double> loss;    // pair-indexed
  int epoch = 0;               // epoch the episode was played in
  double eta = 0.0;
  double proj_residual = 0.0;  // residual of the update after this episode
  double realized_reward = 0.0;
  double expected_reward = 0.0;     // r_t' q_true
  std::vector<double> violations;   // [G_t' q_true]_i
};

struct EpochSnapshot {
  int epoch = 0;
  int start_episode = 0;  // first episode played under this epoch
  std::vector<double> eps_pairs;
  std::vector<double> phat_triples;
};

struct RunTrace {
  LayerLayout shape;
  std::vector<double> kernel;  // true kernel, for measurement only
  long long T = 0;
  double delta = 0.1;
  std::uint64_t seed = 0;
  int m = 1;
  Regime reward_regime = Regime::stochastic;
  Regime constraint_regime = Regime::stochastic;
  double dual_eta = 0.0;
  double dual_cap = 0.0;
  double primal_C = 0.0;
  std::vector<EpisodeRecord> episodes;
  std::vector<EpochSnapshot> epochs;
  double wall_seconds = 0.0;
};

// ell(x,a) = sum_i g_i(x,a) lambda_i - r(x,a).
std::vector<double> build_loss(const RewardSample& r, const ConstraintSample& g,
                               const std::vector<double>& lambda);

// Runs exactly T episodes of the primal-dual loop: play the policy induced
// by the current iterate, sample a trajectory from the true kernel, reveal
// the episode's reward and constraints, build the Lagrangian loss, update
// the primal (adaptive step) and the dual (fixed step).  Deterministic for a
// fixed config and seed.
RunTrace run(const RunConfig& cfg);

// One row per episode: t, reward_realized, expected_reward, violation_i...,
// lambda_l1, epoch, proj_residual.
void write_trace_csv(std::ostream& os, const RunTrace& trace);
std::string trace_csv_string(const RunTrace& trace);

}  // namespace ocmdp
