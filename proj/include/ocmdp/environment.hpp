#pragma once

#include <random>
#include <string>
#include <vector>

#include "ocmdp/cmdp.hpp"

namespace ocmdp {

enum class Regime { stochastic, adversarial };

/// Bounded scalar distribution for one (x,a) entry.
///   point:            always `a`
///   bernoulli:        1 with probability p, else 0
///   beta:             Beta(a, b) on [0,1]
///   scaled_bernoulli: `b` with probability p, else `a`
///   uniform:          Uniform[a, b]
struct ScalarFamily {
  enum class Kind { point, bernoulli, beta, scaled_bernoulli, uniform };
  Kind kind = Kind::point;
  double a = 0.0, b = 0.0, p = 0.0;

  static ScalarFamily point(double v) { return {Kind::point, v, 0.0, 0.0}; }
  static ScalarFamily bernoulli(double p) { return {Kind::bernoulli, 0, 0, p}; }
  static ScalarFamily beta(double a, double b) { return {Kind::beta, a, b, 0}; }
  static ScalarFamily scaled_bernoulli(double lo, double hi, double p) {
    return {Kind::scaled_bernoulli, lo, hi, p};
  }
  static ScalarFamily uniform(double lo, double hi) {
    return {Kind::uniform, lo, hi, 0};
  }

  double mean() const;
  double support_lo() const;
  double support_hi() const;
  double sample(std::mt19937_64& rng) const;
};

/// Deterministic schedule for an adversarial stream of vectors.
///   alternating:  odd episodes take phase[0], even episodes phase[1]
///   phase_switch: phase[0] until switch_at (exclusive), phase[1] after
///   explicit_list: one vector per episode (e.g. loaded from CSV)
struct Schedule {
  enum class Kind { alternating, phase_switch, explicit_list };
  Kind kind = Kind::alternating;
  std::vector<std::vector<double>> phases;  // two entries for the scripted kinds
  std::vector<std::vector<double>> list;
  long long switch_at = 0;

  const std::vector<double>& at(long long t) const;
  // Distinct vectors over episodes 1..T, for worst-case-over-time oracles.
  std::vector<std::vector<double>> unique_over(long long T) const;
  std::vector<double> mean_over(long long T) const;
};

struct EnvironmentSpec {
  int m = 1;
  Regime reward_regime = Regime::stochastic;
  Regime constraint_regime = Regime::stochastic;

  // Stochastic data, pair-indexed (constraints: one block per i in [m]).
  std::vector<ScalarFamily> reward_families;
  std::vector<std::vector<ScalarFamily>> constraint_families;

  // Adversarial data: reward schedule over pair vectors, constraint schedule
  // over row-major (m x pairs) matrices.
  Schedule reward_schedule;
  Schedule constraint_schedule;

  void validate(const LayerLayout& shape, long long T) const;
};

std::pair<RewardSample, ConstraintSample> draw_episode(const EnvironmentSpec& spec,
                                                       long long t,
                                                       std::mt19937_64& rng);

std::vector<double> mean_reward(const EnvironmentSpec& spec, long long T);
// Row-major m x pairs.
std::vector<double> mean_constraints(const EnvironmentSpec& spec, long long T);

// Materialized distinct constraint matrices (adversarial regime); the mean
// matrix alone in the stochastic regime.
std::vector<std::vector<double>> unique_constraint_matrices(
    const EnvironmentSpec& spec, long long T);

// Adversarial schedule CSV: each line "t, g[0], ..., g[m*pairs-1], r[0], ...,
// r[pairs-1]" in episode order.
Schedule load_schedule_csv(const std::string& path, int vector_size,
                           int column_offset);

}  // namespace ocmdp
