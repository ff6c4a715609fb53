#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "ocmdp/dual.hpp"
#include "ocmdp/metrics.hpp"
#include "ocmdp/primal.hpp"
#include "oracles.hpp"

using namespace ocmdp;

TEST_CASE("dual learning rate matches the closed form") {
  // 1 / (100 * 1 * 8 * sqrt(100 ln(1e5)))
  double expected = 1.0 / (800.0 * std::sqrt(100.0 * std::log(1e5)));
  CHECK(dual_learning_rate(1, 4, 2, 100, 0.1) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(3.684e-5).epsilon(1e-3));

  // decreasing in every argument
  double base = dual_learning_rate(1, 4, 2, 100, 0.1);
  CHECK(dual_learning_rate(2, 4, 2, 100, 0.1) < base);
  CHECK(dual_learning_rate(1, 8, 2, 100, 0.1) < base);
  CHECK(dual_learning_rate(1, 4, 4, 100, 0.1) < base);
  CHECK(dual_learning_rate(1, 4, 2, 400, 0.1) < base);
}

TEST_CASE("dual updates clamp to the box") {
  DualPlayer d(1, 16, 0.1, 4, 2, std::nullopt, 0.1);
  CHECK(d.cap == doctest::Approx(2.0));
  CHECK(d.lambda == std::vector<double>{0.0});

  d.update({0.3});
  CHECK(d.lambda[0] == doctest::Approx(0.03));

  d.lambda[0] = d.cap;
  d.update({1.0});
  CHECK(d.lambda[0] == doctest::Approx(d.cap));

  d.lambda[0] = 0.0;
  d.update({-1.0});
  CHECK(d.lambda[0] == doctest::Approx(0.0));
}

TEST_CASE("dual regret sums") {
  SUBCASE("self-comparison is zero") {
    std::vector<std::vector<double>> lam = {{0.2}, {0.2}, {0.2}};
    std::vector<std::vector<double>> v = {{0.5}, {-0.3}, {0.1}};
    CHECK(dual_regret(lam, v, {0.2}, 1, 3) == doctest::Approx(0.0));
  }
  SUBCASE("zero violations are zero for every comparator") {
    std::vector<std::vector<double>> lam = {{0.1}, {0.7}};
    std::vector<std::vector<double>> v = {{0.0}, {0.0}};
    CHECK(dual_regret(lam, v, {1.5}, 1, 2) == doctest::Approx(0.0));
  }
  SUBCASE("single step arithmetic") {
    std::vector<std::vector<double>> lam = {{0.2}};
    std::vector<std::vector<double>> v = {{0.5}};
    CHECK(dual_regret(lam, v, {0.0}, 1, 1) == doctest::Approx(-0.1));
  }
}

TEST_CASE("per-step multiplier growth bound and box membership") {
  // ||lambda_{t+1}||_1 - ||lambda_t||_1 <= m eta L on every step.
  LoopFreeCmdp p = fixtures::t1_cmdp();
  DualPlayer d(1, 1000, 0.1, 4, 2, 1.0);  // K=1 to get visible motion
  std::mt19937_64 rng(3);
  const double L = 2.0;
  double prev = 0.0;
  for (int t = 0; t < 500; ++t) {
    double v = L * (2.0 * next_uniform(rng) - 1.0);
    d.update({v});
    double l1 = std::abs(d.lambda[0]);
    CHECK(l1 - prev <= 1 * d.eta * L + 1e-15);
    CHECK(l1 >= 0.0);
    CHECK(l1 <= d.cap);
    prev = l1;
  }
}

TEST_CASE("multiplier lower bound when the cap is never hit") {
  // lambda_{t,i} >= eta * sum_{tau<t} v_hat_{tau,i} as long as no clamp at
  // the top occurred.
  DualPlayer d(2, 10000, 0.1, 4, 2, 1.0);
  std::mt19937_64 rng(4);
  std::vector<double> cumulative(2, 0.0);
  for (int t = 0; t < 2000; ++t) {
    CHECK(d.lambda[0] >= d.eta * cumulative[0] - 1e-12);
    CHECK(d.lambda[1] >= d.eta * cumulative[1] - 1e-12);
    std::vector<double> v = {2.0 * next_uniform(rng) - 1.0,
                             2.0 * next_uniform(rng) - 1.0};
    d.update(v);
    REQUIRE(d.lambda[0] < d.cap);  // instance keeps multipliers small
    cumulative[0] += v[0];
    cumulative[1] += v[1];
  }
}

TEST_CASE("primal initialization is uniform per layer") {
  LayerLayout shape({1, 2, 1}, 2);
  PrimalPlayer player(shape, 0.1, 100);
  const std::vector<double>& q = player.occupancy();
  // layer-0 triples: 1/(1*2*2) = 0.25 each
  for (int a = 0; a < 2; ++a) {
    int base = shape.triple_base[shape.pair_index(0, a)];
    for (int j = 0; j < 2; ++j) CHECK(q[base + j] == doctest::Approx(0.25));
  }
  // layer-1 triples: 1/(2*2*1) = 0.25 each
  for (int x : {1, 2})
    for (int a = 0; a < 2; ++a)
      CHECK(q[shape.triple_base[shape.pair_index(x, a)]] ==
            doctest::Approx(0.25));
  // layer sums are 1 and flow holds: validate directly
  OccupancyMeasure qm{q};
  validate_occupancy(shape, qm);
  // each layer-1 state receives and emits 0.5
  std::vector<double> mass = state_marginal(shape, q);
  CHECK(mass[1] == doctest::Approx(0.5));
  CHECK(mass[2] == doctest::Approx(0.5));
  CHECK(player.epoch() == 1);
}

TEST_CASE("primal step size") {
  // T1 constants: C = 5*4*2/2 = 20; lbar=2, T=100 -> 1/(2*20*10).
  CHECK(primal_step_constant(4, 2, 2) == doctest::Approx(20.0));
  CHECK(primal_step_size(2.0, 20.0, 100) == doctest::Approx(0.0025));
  CHECK(primal_step_size(4.0, 20.0, 100) ==
        doctest::Approx(0.5 * primal_step_size(2.0, 20.0, 100)));
  CHECK(primal_step_size(0.0, 20.0, 100) ==
        doctest::Approx(1.0 / (20.0 * 10.0)));
}

TEST_CASE("primal update moves mass away from a lossy pair") {
  LoopFreeCmdp p = fixtures::t1_cmdp();
  const LayerLayout& s = p.shape;
  PrimalOptions opts;
  opts.known_kernel = p.kernel;  // exact polytope, no estimation error
  PrimalPlayer player(s, 0.1, 100, opts);
  std::vector<double> loss(s.total_pairs, 0.0);
  loss[s.pair_index(0, 0)] = 1.0;
  Trajectory tr;
  tr.steps = {{0, 0}, {1, 0}};
  tr.terminal = 3;
  double before = pair_marginal(s, player.occupancy())[s.pair_index(0, 0)];
  PrimalUpdateInfo info = player.update(loss, tr);
  double after = pair_marginal(s, player.occupancy())[s.pair_index(0, 0)];
  CHECK(after < before);
  CHECK(info.eta == doctest::Approx(primal_step_size(1.0, 20.0, 100)));
  // cross-check the projected point against the brute oracle
  std::vector<double> target = uniform_occupancy(s);
  for (int j = 0; j < 2; ++j)
    target[s.triple_base[s.pair_index(0, 0)] + j] -= info.eta;
  oracles::BruteProjection ref =
      oracles::brute_projection(player.polytope(), target);
  REQUIRE(ref.feasible_found);
  double d = 0.0;
  for (int i = 0; i < s.total_triples; ++i) {
    double diff = player.occupancy()[i] - target[i];
    d += diff * diff;
  }
  CHECK(std::abs(d - ref.sq_dist) <= 1e-5);
}

TEST_CASE("zero loss keeps a feasible iterate in place") {
  LoopFreeCmdp p = fixtures::t1_cmdp();
  PrimalOptions opts;
  opts.known_kernel = p.kernel;
  PrimalPlayer player(p.shape, 0.1, 100, opts);
  // Project the uniform start once so the iterate is feasible for the exact
  // polytope, then feed zero losses.
  std::vector<double> zero(p.shape.total_pairs, 0.0);
  Trajectory tr;
  tr.steps = {{0, 1}, {2, 0}};
  tr.terminal = 3;
  player.update(zero, tr);
  std::vector<double> fixed = player.occupancy();
  player.update(zero, tr);
  for (std::size_t i = 0; i < fixed.size(); ++i)
    CHECK(player.occupancy()[i] == doctest::Approx(fixed[i]).epsilon(1e-6));
}

TEST_CASE("identical loss sequences give identical iterates") {
  LoopFreeCmdp p = fixtures::t1_noisy_cmdp();
  auto run_once = [&]() {
    PrimalPlayer player(p.shape, 0.1, 200);
    std::mt19937_64 rng(77);
    std::vector<std::vector<double>> history;
    for (int t = 0; t < 50; ++t) {
      Policy pi = induce_policy_unchecked(p.shape,
                                          OccupancyMeasure{player.occupancy()});
      Trajectory tr = sample_trajectory(p, pi, rng);
      std::vector<double> loss(p.shape.total_pairs);
      for (double& v : loss) v = 2.0 * next_uniform(rng) - 1.0;
      player.update(loss, tr);
      history.push_back(player.occupancy());
    }
    return history;
  };
  auto a = run_once();
  auto b = run_once();
  CHECK(a == b);  // bitwise identical
}

TEST_CASE("iterates stay valid occupancies throughout a run") {
  LoopFreeCmdp p = fixtures::t1_noisy_cmdp();
  PrimalPlayer player(p.shape, 0.1, 500);
  std::mt19937_64 rng(9);
  double prev_eta = 1e300;
  for (int t = 0; t < 300; ++t) {
    Policy pi = induce_policy_unchecked(p.shape,
                                        OccupancyMeasure{player.occupancy()});
    Trajectory tr = sample_trajectory(p, pi, rng);
    std::vector<double> loss(p.shape.total_pairs);
    for (double& v : loss) v = 2.0 * next_uniform(rng) - 1.0;
    PrimalUpdateInfo info = player.update(loss, tr);
    OccupancyMeasure q{player.occupancy()};
    for (double& v : q.triple) v = std::max(0.0, v);
    validate_occupancy(p.shape, q, 1e-6);
    CHECK(membership_residual(player.polytope(), player.occupancy()) <= 1e-6);
    CHECK(info.eta <= prev_eta + 1e-15);  // monotone step sizes
    prev_eta = info.eta;
  }
}

TEST_CASE("interval regret sums") {
  LayerLayout shape({1, 2, 1}, 2);
  std::vector<double> q1 = uniform_occupancy(shape);
  std::vector<double> loss(shape.total_pairs, 0.5);

  SUBCASE("self-comparison is zero") {
    std::vector<std::vector<double>> losses(5, loss);
    std::vector<std::vector<double>> occ(5, q1);
    CHECK(interval_regret(shape, losses, occ, q1, 1, 5) ==
          doctest::Approx(0.0));
  }
  SUBCASE("window of length one is a single inner product") {
    std::vector<double> q2(shape.total_triples, 0.0);
    q2[shape.triple_index(0, 0, 1)] = 1.0;
    q2[shape.triple_index(1, 0, 3)] = 1.0;
    std::vector<double> biased(shape.total_pairs, 0.0);
    biased[shape.pair_index(0, 0)] = 1.0;
    std::vector<std::vector<double>> losses = {biased};
    std::vector<std::vector<double>> occ = {q1};
    double expect = pair_dot(shape, biased, q1) - pair_dot(shape, biased, q2);
    CHECK(interval_regret(shape, losses, occ, q2, 1, 1) ==
          doctest::Approx(expect));
  }
  SUBCASE("constant series scale with the window length") {
    std::vector<double> q2(shape.total_triples, 0.0);
    q2[shape.triple_index(0, 1, 2)] = 1.0;
    q2[shape.triple_index(2, 1, 3)] = 1.0;
    std::vector<std::vector<double>> losses(7, loss);
    std::vector<std::vector<double>> occ(7, q1);
    double one = interval_regret(shape, losses, occ, q2, 3, 3);
    CHECK(interval_regret(shape, losses, occ, q2, 2, 6) ==
          doctest::Approx(5.0 * one));
  }
}

TEST_CASE("primal interval regret grows like sqrt(T) on scripted losses") {
  // Bounded stochastic losses; comparator is the mean-loss minimizer over
  // the exact polytope.  Checkpoints {2000, 8000, 32000}, slope <= 0.65.
  LoopFreeCmdp p = fixtures::t1_noisy_cmdp();
  const LayerLayout& s = p.shape;
  std::vector<double> mean_loss = fixtures::pair_values(s, -1.0, -0.5, -0.5);
  OccupancyPolytope poly = build_exact_polytope(s, p.kernel);
  LpSolution best = lp_maximize(lift_pair_vector(
      s, [&] {
        std::vector<double> neg(mean_loss);
        for (double& v : neg) v = -v;
        return neg;
      }()), poly);
  REQUIRE(best.status == LpStatus::optimal);
  const std::vector<double>& comparator = best.argmax.triple;

  std::vector<std::pair<double, double>> checkpoints;
  for (long long T : {2000, 8000, 32000}) {
    PrimalPlayer player(s, 0.1, T);
    std::mt19937_64 rng(1234);
    std::vector<std::vector<double>> losses, occ;
    for (long long t = 0; t < T; ++t) {
      Policy pi = induce_policy_unchecked(s, OccupancyMeasure{player.occupancy()});
      Trajectory tr = sample_trajectory(p, pi, rng);
      std::vector<double> loss(s.total_pairs);
      for (int pr = 0; pr < s.total_pairs; ++pr)
        loss[pr] = next_uniform(rng) < 0.5 ? mean_loss[pr] + 0.25
                                           : mean_loss[pr] - 0.25;
      for (double& v : loss) v = std::clamp(v, -1.0, 1.0);
      occ.push_back(induce_occupancy(p, pi).triple);
      losses.push_back(loss);
      player.update(loss, tr);
    }
    double worst = -1e300;
    for (auto [t1, t2] : dyadic_windows(static_cast<int>(T)))
      worst = std::max(worst,
                       interval_regret(s, losses, occ, comparator, t1, t2));
    checkpoints.emplace_back(static_cast<double>(T), worst);
  }
  GrowthFit fit = fit_growth(checkpoints);
  CHECK(fit.slope <= 0.65);
}
