#include "ocmdp/orchestrator.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace ocmdp {

std::vector<double> build_loss(const RewardSample& r, const ConstraintSample& g,
                               const std::vector<double>& lambda) {
  const std::size_t pairs = r.values.size();
  if (g.m != static_cast<int>(lambda.size()) ||
      g.values.size() != pairs * static_cast<std::size_t>(g.m))
    throw ValidationError("loss shapes do not match");
  std::vector<double> loss(pairs, 0.0);
  for (std::size_t pr = 0; pr < pairs; ++pr) {
    double v = -r.values[pr];
    for (int i = 0; i < g.m; ++i)
      v += g.values[static_cast<std::size_t>(i) * pairs + pr] * lambda[i];
    loss[pr] = v;
  }
  return loss;
}

RunTrace run(const RunConfig& cfg) {
  auto started = std::chrono::steady_clock::now();
  validate_cmdp(cfg.cmdp);
  cfg.env.validate(cfg.cmdp.shape, cfg.T);
  if (cfg.T < 2) throw ValidationError("episode budget must be at least 2");
  if (cfg.delta <= 0.0 || cfg.delta >= 1.0)
    throw ValidationError("delta must be in (0,1)");

  const LayerLayout& shape = cfg.cmdp.shape;
  PrimalOptions popts;
  popts.step_constant = cfg.algo.C_override;
  popts.proj_tol = cfg.algo.proj_tol;
  popts.proj_max_iters = cfg.algo.proj_max_iters;
  PrimalPlayer primal(shape, cfg.delta, cfg.T, popts);
  DualPlayer dual(cfg.env.m, cfg.T, cfg.delta, shape.num_states(),
                  shape.num_actions, cfg.algo.K_override,
                  cfg.algo.dual_eta_override);

  RunTrace trace;
  trace.shape = shape;
  trace.kernel = cfg.cmdp.kernel;
  trace.T = cfg.T;
  trace.delta = cfg.delta;
  trace.seed = cfg.seed;
  trace.m = cfg.env.m;
  trace.reward_regime = cfg.env.reward_regime;
  trace.constraint_regime = cfg.env.constraint_regime;
  trace.dual_eta = dual.eta;
  trace.dual_cap = dual.cap;
  trace.primal_C = primal.step_constant();
  trace.episodes.reserve(static_cast<std::size_t>(cfg.T));

  auto snapshot = [&](int start_episode) {
    EpochSnapshot snap;
    snap.epoch = primal.epoch();
    snap.start_episode = start_episode;
    snap.eps_pairs = primal.confidence().epsilon_pairs();
    snap.phat_triples = primal.confidence().empirical_kernel_triples();
    trace.epochs.push_back(std::move(snap));
  };
  snapshot(1);

  std::mt19937_64 rng(cfg.seed);
  const double policy_tol = std::max(kValidationTol, 10.0 * cfg.algo.proj_tol);
  auto episode = [&](long long t) {
    EpisodeRecord rec;
    rec.t = static_cast<int>(t);
    rec.epoch = primal.epoch();
    rec.qhat = primal.occupancy();
    rec.lambda = dual.lambda;

    auto [r_t, g_t] = draw_episode(cfg.env, t, rng);

    // The projected iterate carries solver-level residual, so the policy map
    // validates it at the projection tolerance, not the structural one.
    OccupancyMeasure qhat_m;
    qhat_m.triple = rec.qhat;
    for (double& v : qhat_m.triple) v = std::max(0.0, v);
    validate_occupancy(shape, qhat_m, policy_tol);
    Policy pi = induce_policy_unchecked(shape, qhat_m);

    rec.traj = sample_trajectory(cfg.cmdp, pi, rng);
    rec.q_true = induce_occupancy(cfg.cmdp, pi).triple;

    rec.reward = r_t;
    rec.constraints = g_t;
    for (auto [x, a] : rec.traj.steps)
      rec.realized_reward += r_t.values[shape.pair_index(x, a)];
    rec.expected_reward = pair_dot(shape, r_t.values, rec.q_true);
    rec.violations.assign(cfg.env.m, 0.0);
    {
      std::vector<double> qa = pair_marginal(shape, rec.q_true);
      const std::size_t pairs = qa.size();
      for (int i = 0; i < cfg.env.m; ++i)
        for (std::size_t pr = 0; pr < pairs; ++pr)
          rec.violations[i] +=
              g_t.values[static_cast<std::size_t>(i) * pairs + pr] * qa[pr];
    }

    rec.loss = build_loss(r_t, g_t, dual.lambda);
    std::vector<double> dual_violation(cfg.env.m, 0.0);
    {
      // The dual is fed the violation of the intended occupancy, not the
      // realized one.
      std::vector<double> qa = pair_marginal(shape, rec.qhat);
      const std::size_t pairs = qa.size();
      for (int i = 0; i < cfg.env.m; ++i)
        for (std::size_t pr = 0; pr < pairs; ++pr)
          dual_violation[i] +=
              g_t.values[static_cast<std::size_t>(i) * pairs + pr] * qa[pr];
    }

    PrimalUpdateInfo info = primal.update(rec.loss, rec.traj);
    dual.update(dual_violation);

    rec.eta = info.eta;
    rec.proj_residual = info.proj_residual;
    trace.episodes.push_back(std::move(rec));
    if (info.epoch_changed) snapshot(static_cast<int>(t) + 1);
  };
  for (long long t = 1; t <= cfg.T; ++t) {
    try {
      episode(t);
    } catch (const SolverError& err) {
      throw SolverError("episode " + std::to_string(t) + ": " + err.what(),
                        err.residual);
    } catch (const ValidationError& err) {
      throw ValidationError("episode " + std::to_string(t) + ": " + err.what());
    }
  }
  trace.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  return trace;
}

namespace {
void append_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}
}  // namespace

std::string trace_csv_string(const RunTrace& trace) {
  std::string out = "t,reward_realized,expected_reward";
  for (int i = 1; i <= trace.m; ++i) out += ",violation_" + std::to_string(i);
  out += ",lambda_l1,epoch,proj_residual\n";
  for (const EpisodeRecord& rec : trace.episodes) {
    out += std::to_string(rec.t);
    out += ',';
    append_double(out, rec.realized_reward);
    out += ',';
    append_double(out, rec.expected_reward);
    for (double v : rec.violations) {
      out += ',';
      append_double(out, v);
    }
    double l1 = 0.0;
    for (double v : rec.lambda) l1 += std::abs(v);
    out += ',';
    append_double(out, l1);
    out += ',';
    out += std::to_string(rec.epoch);
    out += ',';
    append_double(out, rec.proj_residual);
    out += '\n';
  }
  return out;
}

void write_trace_csv(std::ostream& os, const RunTrace& trace) {
  os << trace_csv_string(trace);
}

}  // namespace ocmdp
