#include "ocmdp/primal.hpp"

#include <algorithm>
#include <cmath>

namespace ocmdp {

double primal_step_constant(int num_states, int num_actions, int horizon) {
  return 5.0 * num_states * num_actions / static_cast<double>(horizon);
}

double primal_step_size(double lbar, double C, long long T) {
  double l = lbar > 0.0 ? lbar : 1.0;
  return 1.0 / (l * C * std::sqrt(static_cast<double>(T)));
}

std::vector<double> uniform_occupancy(const LayerLayout& shape) {
  std::vector<double> q(shape.total_triples, 0.0);
  for (int k = 0; k < shape.horizon(); ++k) {
    double v = 1.0 / (static_cast<double>(shape.layers[k].size()) *
                      shape.num_actions * shape.layers[k + 1].size());
    for (int x : shape.layers[k])
      for (int a = 0; a < shape.num_actions; ++a) {
        int base = shape.triple_base[shape.pair_index(x, a)];
        for (int j = 0; j < shape.succ_count(x); ++j) q[base + j] = v;
      }
  }
  return q;
}

PrimalPlayer::PrimalPlayer(const LayerLayout& shape, double delta, long long T,
                           PrimalOptions opts)
    : shape_(shape),
      T_(T),
      C_(opts.step_constant.value_or(primal_step_constant(
          shape.num_states(), shape.num_actions, shape.horizon()))),
      opts_(std::move(opts)),
      conf_(ConfidenceState::init(shape, delta, T)),
      qhat_(uniform_occupancy(shape)) {
  rebuild_polytope();
}

void PrimalPlayer::rebuild_polytope() {
  if (opts_.known_kernel) {
    poly_ = build_exact_polytope(shape_, *opts_.known_kernel);
  } else {
    poly_ = build_confidence_polytope(shape_, conf_.empirical_kernel_triples(),
                                      conf_.epsilon_pairs());
  }
  ProjectionOptions popts;
  popts.tol = opts_.proj_tol;
  popts.max_iters = opts_.proj_max_iters;
  engine_ = std::make_unique<ProjectionEngine>(poly_, popts);
}

PrimalUpdateInfo PrimalPlayer::update(const std::vector<double>& loss_pairs,
                                      const Trajectory& traj) {
  PrimalUpdateInfo info;
  bool changed = conf_.record_trajectory(traj);
  if (changed && !opts_.known_kernel) rebuild_polytope();
  info.epoch_changed = changed;
  info.epoch = conf_.epoch;

  double linf = 0.0;
  for (double v : loss_pairs) {
    if (!std::isfinite(v)) throw ValidationError("loss entry is not finite");
    linf = std::max(linf, std::abs(v));
  }
  lbar_ = std::max(lbar_, linf);
  info.eta = primal_step_size(lbar_, C_, T_);

  // A shrinking confidence set can strand the iterate; pull it back in
  // before stepping.
  if (changed && membership_residual(poly_, qhat_) > 10.0 * opts_.proj_tol) {
    ProjectionResult back = engine_->project(qhat_);
    qhat_ = std::move(back.q);
  }

  std::vector<double> target(qhat_);
  for (int x = 0; x < shape_.num_states(); ++x) {
    if (shape_.is_terminal(x)) continue;
    for (int a = 0; a < shape_.num_actions; ++a) {
      int pr = shape_.pair_index(x, a);
      int base = shape_.triple_base[pr];
      for (int j = 0; j < shape_.succ_count(x); ++j)
        target[base + j] -= info.eta * loss_pairs[pr];
    }
  }
  ProjectionResult res = engine_->project(target);
  qhat_ = std::move(res.q);
  info.proj_residual = res.residual;
  return info;
}

double interval_regret(const LayerLayout& shape,
                       const std::vector<std::vector<double>>& losses,
                       const std::vector<std::vector<double>>& occupancies,
                       const std::vector<double>& comparator, int t1, int t2) {
  if (t1 < 1 || t2 < t1 || t2 > static_cast<int>(losses.size()))
    throw ValidationError("interval out of range");
  double acc = 0.0;
  for (int t = t1; t <= t2; ++t) {
    acc += pair_dot(shape, losses[t - 1], occupancies[t - 1]) -
           pair_dot(shape, losses[t - 1], comparator);
  }
  return acc;
}

}  // namespace ocmdp
