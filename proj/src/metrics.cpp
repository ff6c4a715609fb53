#include "ocmdp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ocmdp {

double azuma_reward_bound(int horizon, long long T, double delta) {
  return horizon / std::sqrt(2.0) *
         std::sqrt(static_cast<double>(T) * std::log(2.0 / delta));
}

double azuma_constraint_bound(int horizon, long long T, int window_len,
                              double delta) {
  double log_arg = static_cast<double>(T) * static_cast<double>(T) / delta;
  return 2.0 * horizon * std::sqrt(2.0 * window_len * std::log(log_arg));
}

std::vector<std::pair<int, int>> dyadic_windows(int T) {
  std::vector<std::pair<int, int>> out;
  for (int len = 1; len < T; len *= 2) {
    for (int start = 1; start <= T; start += len)
      out.emplace_back(start, std::min(T, start + len - 1));
    if (len > T / 2) break;
  }
  out.emplace_back(1, T);
  return out;
}

MetricsSummary compute_metrics(const RunTrace& trace,
                               const OracleReport& oracle) {
  if (trace.episodes.empty())
    throw ValidationError("trace is empty");
  const LayerLayout& shape = trace.shape;
  const int T = static_cast<int>(trace.episodes.size());
  const int m = trace.m;
  if (oracle.mean_reward.size() != static_cast<std::size_t>(shape.total_pairs))
    throw ValidationError("oracle does not match trace layout");

  MetricsSummary s;
  s.opt = oracle.opt;
  s.rho = oracle.rho;
  s.zeta = oracle.zeta;
  s.condition2_threshold_value = oracle.condition2_threshold_value;
  s.condition2_holds = oracle.condition2_holds;
  s.dual_cap = trace.dual_cap;
  s.epochs = static_cast<int>(trace.epochs.size());

  const bool has_qstar = oracle.opt_status == LpStatus::optimal;
  std::vector<double> viol_signed(m, 0.0), viol_pos(m, 0.0);
  std::vector<double> reg_series(T, 0.0), reg_hat_series(T, 0.0), g_dev(T, 0.0);
  std::vector<double> lambda_l1(T, 0.0);
  double reward_dev = 0.0;

  for (int t = 0; t < T; ++t) {
    const EpisodeRecord& rec = trace.episodes[t];
    s.cum_reward += rec.expected_reward;
    s.cum_reward_realized += rec.realized_reward;
    s.regret_mean_reward -= pair_dot(shape, oracle.mean_reward, rec.q_true);
    for (int i = 0; i < m; ++i) {
      viol_signed[i] += rec.violations[i];
      viol_pos[i] += std::max(0.0, rec.violations[i]);
    }
    double l1 = 0.0;
    for (double v : rec.lambda) l1 += std::abs(v);
    lambda_l1[t] = l1;
    s.lambda_max_l1 = std::max(s.lambda_max_l1, l1);
    s.proj_residual_max = std::max(s.proj_residual_max, rec.proj_residual);

    std::vector<double> qhat_pairs = pair_marginal(shape, rec.qhat);
    for (int i = 0; i < m; ++i) {
      double vhat = 0.0;
      for (int pr = 0; pr < shape.total_pairs; ++pr)
        vhat += rec.constraints.values[static_cast<std::size_t>(i) *
                                           shape.total_pairs + pr] * qhat_pairs[pr];
      s.dual_regret_zero += (0.0 - rec.lambda[i]) * vhat;
    }

    if (has_qstar) {
      double comp = pair_dot(shape, rec.loss, oracle.q_star.triple);
      reg_series[t] = pair_dot(shape, rec.loss, rec.q_true) - comp;
      reg_hat_series[t] = pair_dot(shape, rec.loss, rec.qhat) - comp;
      double rstar = pair_dot(shape, rec.reward.values, oracle.q_star.triple);
      double rbar_star = pair_dot(shape, oracle.mean_reward, oracle.q_star.triple);
      reward_dev += rstar - rbar_star;
      std::vector<double> q_pairs = pair_marginal(shape, rec.q_true);
      double dev = 0.0;
      for (int i = 0; i < m; ++i) {
        double gi = 0.0;
        for (int pr = 0; pr < shape.total_pairs; ++pr) {
          std::size_t idx = static_cast<std::size_t>(i) * shape.total_pairs + pr;
          gi += (rec.constraints.values[idx] - oracle.mean_constraints[idx]) *
                q_pairs[pr];
        }
        dev += rec.lambda[i] * gi;
      }
      g_dev[t] = dev;
    }
  }
  s.regret = T * oracle.opt - s.cum_reward;
  s.regret_mean_reward += T * oracle.opt;
  s.violation_signed = *std::max_element(viol_signed.begin(), viol_signed.end());
  s.violation_pos = *std::max_element(viol_pos.begin(), viol_pos.end());
  s.lambda_le_cap = s.lambda_max_l1 <= trace.dual_cap + 1e-12;
  s.lambda_le_zeta = s.zeta && s.lambda_max_l1 <= *s.zeta + 1e-12;

  // Window machinery over prefix sums.
  auto prefix = [T](const std::vector<double>& a) {
    std::vector<double> p(T + 1, 0.0);
    for (int t = 0; t < T; ++t) p[t + 1] = p[t] + a[t];
    return p;
  };
  if (has_qstar) {
    std::vector<double> preg = prefix(reg_series), preg_hat = prefix(reg_hat_series);
    std::vector<double> pdev = prefix(g_dev);
    double worst = -std::numeric_limits<double>::infinity();
    double worst_hat = worst;
    double worst_ratio = 0.0;
    int levels = 0;
    while ((1 << (levels + 1)) <= T) ++levels;
    s.window_regret_qstar_by_level.assign(levels + 1, worst);
    for (auto [t1, t2] : dyadic_windows(T)) {
      double r = preg[t2] - preg[t1 - 1];
      int level = 0;
      while ((1 << (level + 1)) <= t2 - t1 + 1) ++level;
      s.window_regret_qstar_by_level[level] =
          std::max(s.window_regret_qstar_by_level[level], r);
      worst = std::max(worst, r);
      worst_hat = std::max(worst_hat, preg_hat[t2] - preg_hat[t1 - 1]);
      double margin = std::abs(pdev[t2] - pdev[t1 - 1]);
      double lmax = 0.0;
      for (int t = t1; t <= t2; ++t) lmax = std::max(lmax, lambda_l1[t - 1]);
      double bound = lmax * azuma_constraint_bound(shape.horizon(), trace.T,
                                                   t2 - t1 + 1, trace.delta);
      if (bound > 0.0)
        worst_ratio = std::max(worst_ratio, margin / bound);
      else if (margin > 1e-12)
        worst_ratio = std::max(worst_ratio, 2.0);
    }
    s.max_window_regret_qstar = worst;
    s.max_window_regret_qstar_hat = worst_hat;
    s.azuma_constraint_max_ratio = worst_ratio;
    s.azuma_constraint_ok = worst_ratio <= 1.0;
    s.azuma_reward_margin = std::abs(reward_dev);
    s.azuma_reward_bound_value =
        azuma_reward_bound(shape.horizon(), trace.T, trace.delta);
    s.azuma_reward_ok = s.azuma_reward_margin <= s.azuma_reward_bound_value;
  }

  // Coverage: the true kernel sits inside every epoch's confidence set.
  for (const EpochSnapshot& snap : trace.epochs) {
    for (int x = 0; x < shape.num_states() && s.coverage_ok; ++x) {
      if (shape.is_terminal(x)) continue;
      for (int a = 0; a < shape.num_actions; ++a) {
        int pr = shape.pair_index(x, a);
        int base = shape.triple_base[pr];
        double l1 = 0.0;
        for (int j = 0; j < shape.succ_count(x); ++j)
          l1 += std::abs(trace.kernel[base + j] - snap.phat_triples[base + j]);
        if (l1 > snap.eps_pairs[pr] + 1e-12) {
          s.coverage_ok = false;
          break;
        }
      }
    }
    if (!s.coverage_ok) break;
  }
  return s;
}

GrowthFit fit_growth(const std::vector<std::pair<double, double>>& checkpoints) {
  if (checkpoints.size() < 3)
    throw ValidationError("growth fit needs at least 3 checkpoints");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(checkpoints.size());
  std::vector<std::pair<double, double>> logs;
  for (auto [T, v] : checkpoints) {
    if (T <= 0.0) throw ValidationError("checkpoint T must be positive");
    double x = std::log(T);
    double y = std::log(std::max(1.0, v));
    logs.emplace_back(x, y);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  GrowthFit fit;
  double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-12)
    throw ValidationError("degenerate checkpoint grid");
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  for (auto [x, y] : logs)
    fit.max_residual =
        std::max(fit.max_residual, std::abs(y - fit.slope * x - fit.intercept));
  return fit;
}

}  // namespace ocmdp
