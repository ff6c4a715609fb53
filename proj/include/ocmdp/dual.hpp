#pragma once

#include <optional>
#include <vector>

#include "ocmdp/cmdp.hpp"

namespace ocmdp {

// 1 / (K sqrt(T ln(T^2/delta))); the default K is 100 m |X| |A|.
double dual_learning_rate(int m, int num_states, int num_actions, long long T,
                          double delta, std::optional<double> K = std::nullopt);

/// Projected gradient ascent on the multipliers over the truncated box
/// [0, T^(1/4)]^m, fixed learning rate, lambda_1 = 0.
struct DualPlayer {
  int m = 0;
  long long T = 0;
  double eta = 0.0;
  double cap = 0.0;  // T^(1/4)
  std::vector<double> lambda;

  DualPlayer() = default;
  DualPlayer(int m, long long T, double delta, int num_states, int num_actions,
             std::optional<double> K_override = std::nullopt,
             std::optional<double> eta_override = std::nullopt);

  // lambda <- clamp(lambda + eta * violation, [0, cap]) componentwise.
  void update(const std::vector<double>& violation);
};

// sum_{t=t1..t2} (comparator - lambda_t)' v_t, 1-based inclusive window.
double dual_regret(const std::vector<std::vector<double>>& lambdas,
                   const std::vector<std::vector<double>>& violations,
                   const std::vector<double>& comparator, int t1, int t2);

}  // namespace ocmdp
