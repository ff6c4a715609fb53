#include "ocmdp/dual.hpp"

#include <algorithm>
#include <cmath>

namespace ocmdp {

double dual_learning_rate(int m, int num_states, int num_actions, long long T,
                          double delta, std::optional<double> K) {
  double k = K.value_or(100.0 * m * num_states * num_actions);
  double log_arg = static_cast<double>(T) * static_cast<double>(T) / delta;
  return 1.0 / (k * std::sqrt(static_cast<double>(T) * std::log(log_arg)));
}

DualPlayer::DualPlayer(int m_in, long long T_in, double delta, int num_states,
                       int num_actions, std::optional<double> K_override,
                       std::optional<double> eta_override)
    : m(m_in), T(T_in) {
  if (m < 1) throw ValidationError("need at least one constraint");
  if (T < 2) throw ValidationError("episode budget must be at least 2");
  if (delta <= 0.0 || delta >= 1.0)
    throw ValidationError("delta must be in (0,1)");
  eta = eta_override.value_or(
      dual_learning_rate(m, num_states, num_actions, T, delta, K_override));
  cap = std::pow(static_cast<double>(T), 0.25);
  lambda.assign(m, 0.0);
}

void DualPlayer::update(const std::vector<double>& violation) {
  for (int i = 0; i < m; ++i)
    lambda[i] = std::clamp(lambda[i] + eta * violation[i], 0.0, cap);
}

double dual_regret(const std::vector<std::vector<double>>& lambdas,
                   const std::vector<std::vector<double>>& violations,
                   const std::vector<double>& comparator, int t1, int t2) {
  double acc = 0.0;
  for (int t = t1; t <= t2; ++t) {
    const auto& lt = lambdas[t - 1];
    const auto& vt = violations[t - 1];
    for (std::size_t i = 0; i < comparator.size(); ++i)
      acc += (comparator[i] - lt[i]) * vt[i];
  }
  return acc;
}

}  // namespace ocmdp
