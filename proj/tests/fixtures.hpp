// Shared test instances.  t1 is the canonical two-layer fixture used across
// the suites: layers {x0} / {u,v} / {xL}, actions {a,b}, P(u|x0,a)=1,
// P(v|x0,b)=1, reward 1 on (x0,a), one constraint +1 on (x0,a) and -1 on
// (x0,b).  Hand analysis: OPT = 0.5 at q(x0,a)=q(x0,b)=0.5, rho = 1, zeta = 80.
#pragma once

#include <vector>

#include "ocmdp/environment.hpp"
#include "ocmdp/orchestrator.hpp"

namespace fixtures {

using namespace ocmdp;

inline LoopFreeCmdp t1_cmdp() {
  LoopFreeCmdp p;
  p.shape = LayerLayout({1, 2, 1}, 2);
  p.state_names = {"x0", "u", "v", "xL"};
  p.action_names = {"a", "b"};
  p.kernel.assign(p.shape.total_triples, 0.0);
  p.kernel[p.shape.triple_index(0, 0, 1)] = 1.0;  // x0 --a--> u
  p.kernel[p.shape.triple_index(0, 1, 2)] = 1.0;  // x0 --b--> v
  for (int x : {1, 2})
    for (int a = 0; a < 2; ++a) p.kernel[p.shape.triple_index(x, a, 3)] = 1.0;
  return p;
}

// Same shape with a noisy first layer, so the kernel actually has to be
// estimated.
inline LoopFreeCmdp t1_noisy_cmdp() {
  LoopFreeCmdp p = t1_cmdp();
  p.kernel[p.shape.triple_index(0, 0, 1)] = 0.8;
  p.kernel[p.shape.triple_index(0, 0, 2)] = 0.2;
  p.kernel[p.shape.triple_index(0, 1, 1)] = 0.3;
  p.kernel[p.shape.triple_index(0, 1, 2)] = 0.7;
  return p;
}

inline std::vector<ScalarFamily> point_families(const LayerLayout& shape,
                                                const std::vector<double>& v) {
  std::vector<ScalarFamily> out(shape.total_pairs);
  for (int i = 0; i < shape.total_pairs; ++i) out[i] = ScalarFamily::point(v[i]);
  return out;
}

inline std::vector<double> pair_values(const LayerLayout& shape, double x0a,
                                       double x0b, double layer1) {
  std::vector<double> v(shape.total_pairs, layer1);
  v[shape.pair_index(0, 0)] = x0a;
  v[shape.pair_index(0, 1)] = x0b;
  return v;
}

inline EnvironmentSpec t1_env(const LayerLayout& shape) {
  EnvironmentSpec env;
  env.m = 1;
  env.reward_families = point_families(shape, pair_values(shape, 1.0, 0.0, 0.0));
  env.constraint_families.push_back(
      point_families(shape, pair_values(shape, 1.0, -1.0, 0.0)));
  return env;
}

inline RunConfig t1_config(long long T, std::uint64_t seed,
                           double delta = 0.1) {
  RunConfig cfg;
  cfg.cmdp = t1_cmdp();
  cfg.env = t1_env(cfg.cmdp.shape);
  cfg.T = T;
  cfg.delta = delta;
  cfg.seed = seed;
  return cfg;
}

// Stochastic-constraint instance whose safe optimum is also the reward
// optimum, reached only after crossing a violating region from the uniform
// start: reward 1 on (x0,a); constraint -0.25 on (x0,a), +1 on (x0,b),
// zero-mean noise +-0.2 on the second layer.  rho = 0.25, OPT = 1.
inline EnvironmentSpec aligned_safe_env(const LayerLayout& shape) {
  EnvironmentSpec env;
  env.m = 1;
  env.reward_families = point_families(shape, pair_values(shape, 1.0, 0.0, 0.0));
  std::vector<ScalarFamily> g(shape.total_pairs,
                              ScalarFamily::scaled_bernoulli(-0.2, 0.2, 0.5));
  g[shape.pair_index(0, 0)] = ScalarFamily::point(-0.25);
  g[shape.pair_index(0, 1)] = ScalarFamily::point(1.0);
  env.constraint_families.push_back(std::move(g));
  return env;
}

// Thin-margin variant: the safe set shrinks to q(x0,a) >= 1/1.05, rho = 0.05.
inline EnvironmentSpec thin_margin_env(const LayerLayout& shape) {
  EnvironmentSpec env;
  env.m = 1;
  env.reward_families = point_families(shape, pair_values(shape, 1.0, 0.0, 0.0));
  env.constraint_families.push_back(
      point_families(shape, pair_values(shape, -0.05, 1.0, 0.0)));
  return env;
}

// Sign-alternating adversarial constraints on (x0,a) with the safe route
// pinned at -1, so the worst-case margin over the schedule is exactly 1.
inline EnvironmentSpec alternating_env(const LayerLayout& shape) {
  EnvironmentSpec env;
  env.m = 1;
  env.reward_families =
      point_families(shape, pair_values(shape, 0.55, 1.0, 0.0));
  env.constraint_regime = Regime::adversarial;
  env.constraint_schedule.kind = Schedule::Kind::alternating;
  env.constraint_schedule.phases = {pair_values(shape, -1.0, -1.0, 0.0),
                                    pair_values(shape, 1.0, -1.0, 0.0)};
  return env;
}

// Bernoulli rewards and two-point constraints with real noise everywhere;
// used for the concentration and coverage checks.
inline EnvironmentSpec noisy_env(const LayerLayout& shape) {
  EnvironmentSpec env;
  env.m = 1;
  std::vector<ScalarFamily> r(shape.total_pairs, ScalarFamily::bernoulli(0.5));
  r[shape.pair_index(0, 0)] = ScalarFamily::bernoulli(0.7);
  r[shape.pair_index(0, 1)] = ScalarFamily::bernoulli(0.3);
  env.reward_families = std::move(r);
  std::vector<ScalarFamily> g(shape.total_pairs,
                              ScalarFamily::scaled_bernoulli(-0.3, 0.3, 0.5));
  g[shape.pair_index(0, 0)] = ScalarFamily::scaled_bernoulli(0.0, 1.0, 0.5);
  g[shape.pair_index(0, 1)] = ScalarFamily::scaled_bernoulli(-1.0, 0.0, 0.5);
  env.constraint_families.push_back(std::move(g));
  return env;
}

}  // namespace fixtures
