#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace ocmdp;

namespace {

Policy uniform_policy(const LayerLayout& shape) {
  Policy pi;
  pi.probs.assign(shape.total_pairs, 1.0 / shape.num_actions);
  return pi;
}

OccupancyMeasure t1_occupancy(double qa, double qb, double ua, double va) {
  // Mass qa via u (split ua / 1-ua over u's actions), qb via v.
  LoopFreeCmdp p = fixtures::t1_cmdp();
  const LayerLayout& s = p.shape;
  OccupancyMeasure q;
  q.triple.assign(s.total_triples, 0.0);
  q.triple[s.triple_index(0, 0, 1)] = qa;
  q.triple[s.triple_index(0, 1, 2)] = qb;
  q.triple[s.triple_index(1, 0, 3)] = qa * ua;
  q.triple[s.triple_index(1, 1, 3)] = qa * (1.0 - ua);
  q.triple[s.triple_index(2, 0, 3)] = qb * va;
  q.triple[s.triple_index(2, 1, 3)] = qb * (1.0 - va);
  return q;
}

}  // namespace

TEST_CASE("layout indexing is dense and layer-ordered") {
  LayerLayout s({1, 2, 1}, 2);
  CHECK(s.num_states() == 4);
  CHECK(s.total_pairs == 6);
  CHECK(s.total_triples == 8);  // 1*2*2 + 2*2*1
  CHECK(s.horizon() == 2);
  CHECK(s.layer_of[3] == 2);
  CHECK(s.is_terminal(3));
  CHECK(s.triple_index(0, 0, 1) == 0);
  CHECK(s.triple_index(0, 1, 2) == 3);
}

TEST_CASE("induce_policy on the fixture") {
  LoopFreeCmdp p = fixtures::t1_cmdp();
  const LayerLayout& s = p.shape;

  SUBCASE("equal marginals give the 0.5 ratio") {
    OccupancyMeasure q = t1_occupancy(0.5, 0.5, 0.5, 0.5);
    Policy pi = induce_policy(s, q);
    CHECK(pi.probs[s.pair_index(0, 0)] == doctest::Approx(0.5));
  }
  SUBCASE("concentrated mass gives a deterministic action") {
    OccupancyMeasure q = t1_occupancy(1.0, 0.0, 1.0, 0.5);
    Policy pi = induce_policy(s, q);
    CHECK(pi.probs[s.pair_index(0, 0)] == doctest::Approx(1.0));
    CHECK(pi.probs[s.pair_index(0, 1)] == doctest::Approx(0.0));
  }
  SUBCASE("unreachable state falls back to uniform") {
    OccupancyMeasure q = t1_occupancy(1.0, 0.0, 0.5, 0.5);
    Policy pi = induce_policy(s, q);  // v has zero mass
    CHECK(pi.probs[s.pair_index(2, 0)] == doctest::Approx(0.5));
    CHECK(pi.probs[s.pair_index(2, 1)] == doctest::Approx(0.5));
  }
  SUBCASE("malformed occupancies are rejected with the violated condition") {
    OccupancyMeasure q = t1_occupancy(0.5, 0.5, 0.5, 0.5);
    q.triple[0] = -0.1;
    CHECK_THROWS_WITH_AS(induce_policy(s, q),
                         doctest::Contains("negative occupancy"),
                         ValidationError);
    OccupancyMeasure q2 = t1_occupancy(0.4, 0.5, 0.5, 0.5);
    CHECK_THROWS_WITH_AS(induce_policy(s, q2),
                         doctest::Contains("normalization"), ValidationError);
    OccupancyMeasure q3 = t1_occupancy(0.5, 0.5, 0.5, 0.5);
    q3.triple[s.triple_index(1, 0, 3)] = 0.35;  // break flow at u and v while
    q3.triple[s.triple_index(2, 0, 3)] = 0.15;  // keeping the layer sum at 1
    CHECK_THROWS_WITH_AS(induce_policy(s, q3), doctest::Contains("flow"),
                         ValidationError);
  }
}

TEST_CASE("induce_occupancy matches trajectory enumeration") {
  LoopFreeCmdp p = fixtures::t1_cmdp();
  const LayerLayout& s = p.shape;

  SUBCASE("uniform at x0, deterministic downstream") {
    Policy pi = uniform_policy(s);
    pi.probs[s.pair_index(1, 0)] = 1.0;
    pi.probs[s.pair_index(1, 1)] = 0.0;
    pi.probs[s.pair_index(2, 0)] = 1.0;
    pi.probs[s.pair_index(2, 1)] = 0.0;
    OccupancyMeasure q = induce_occupancy(p, pi);
    CHECK(q.triple[s.triple_index(0, 0, 1)] == doctest::Approx(0.5));
    CHECK(q.triple[s.triple_index(0, 1, 2)] == doctest::Approx(0.5));
    CHECK(q.triple[s.triple_index(1, 0, 3)] == doctest::Approx(0.5));
    std::vector<double> ref = oracles::enumerate_occupancy(p, pi);
    for (int i = 0; i < s.total_triples; ++i)
      CHECK(q.triple[i] == doctest::Approx(ref[i]).epsilon(1e-12));
  }
  SUBCASE("deterministic policy on a deterministic kernel is a 0/1 path") {
    Policy pi;
    pi.probs.assign(s.total_pairs, 0.0);
    pi.probs[s.pair_index(0, 0)] = 1.0;
    pi.probs[s.pair_index(1, 1)] = 1.0;
    pi.probs[s.pair_index(2, 0)] = 1.0;
    OccupancyMeasure q = induce_occupancy(p, pi);
    for (double v : q.triple) CHECK((v == doctest::Approx(0.0) || v == doctest::Approx(1.0)));
    CHECK(q.triple[s.triple_index(0, 0, 1)] == doctest::Approx(1.0));
    CHECK(q.triple[s.triple_index(1, 1, 3)] == doctest::Approx(1.0));
  }
  SUBCASE("noisy kernel agrees with enumeration and validates") {
    LoopFreeCmdp pn = fixtures::t1_noisy_cmdp();
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
      Policy pi;
      pi.probs.assign(s.total_pairs, 0.0);
      for (int x = 0; x < s.num_states(); ++x) {
        if (s.is_terminal(x)) continue;
        double u = next_uniform(rng);
        pi.probs[s.pair_index(x, 0)] = u;
        pi.probs[s.pair_index(x, 1)] = 1.0 - u;
      }
      OccupancyMeasure q = induce_occupancy(pn, pi);
      validate_occupancy(s, q);
      std::vector<double> ref = oracles::enumerate_occupancy(pn, pi);
      for (int i = 0; i < s.total_triples; ++i)
        CHECK(q.triple[i] == doctest::Approx(ref[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("policy/occupancy round trip is the identity on reachable states") {
  LoopFreeCmdp p = fixtures::t1_noisy_cmdp();
  const LayerLayout& s = p.shape;
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Policy pi;
    pi.probs.assign(s.total_pairs, 0.0);
    for (int x = 0; x < s.num_states(); ++x) {
      if (s.is_terminal(x)) continue;
      double u = 0.05 + 0.9 * next_uniform(rng);
      pi.probs[s.pair_index(x, 0)] = u;
      pi.probs[s.pair_index(x, 1)] = 1.0 - u;
    }
    OccupancyMeasure q = induce_occupancy(p, pi);
    Policy back = induce_policy(s, q);
    std::vector<double> mass = state_marginal(s, q.triple);
    for (int x = 0; x < s.num_states(); ++x) {
      if (s.is_terminal(x) || mass[x] <= 0.0) continue;
      for (int a = 0; a < s.num_actions; ++a)
        CHECK(back.probs[s.pair_index(x, a)] ==
              doctest::Approx(pi.probs[s.pair_index(x, a)]).epsilon(1e-9));
    }
  }
}

TEST_CASE("trajectory sampling") {
  LoopFreeCmdp p = fixtures::t1_cmdp();
  const LayerLayout& s = p.shape;

  SUBCASE("deterministic chain always takes the same path") {
    Policy pi;
    pi.probs.assign(s.total_pairs, 0.5);
    pi.probs[s.pair_index(0, 0)] = 1.0;
    pi.probs[s.pair_index(0, 1)] = 0.0;
    for (int seed = 0; seed < 10; ++seed) {
      Trajectory tr = sample_trajectory(p, pi, static_cast<std::uint64_t>(seed));
      CHECK(tr.steps[0].first == 0);
      CHECK(tr.steps[0].second == 0);
      CHECK(tr.steps[1].first == 1);
      CHECK(tr.terminal == 3);
    }
  }
  SUBCASE("same seed, same trajectory") {
    Policy pi = uniform_policy(s);
    Trajectory a = sample_trajectory(p, pi, 123u);
    Trajectory b = sample_trajectory(p, pi, 123u);
    CHECK(a.steps == b.steps);
    CHECK(a.terminal == b.terminal);
    // layer indices strictly increase
    for (std::size_t k = 0; k < a.steps.size(); ++k)
      CHECK(s.layer_of[a.steps[k].first] == static_cast<int>(k));
  }
  SUBCASE("empirical pair frequency matches the induced occupancy") {
    Policy pi = uniform_policy(s);
    OccupancyMeasure q = induce_occupancy(p, pi);
    std::vector<double> qa = pair_marginal(s, q.triple);
    const int N = 100000;
    std::mt19937_64 rng(99);
    int hits = 0;
    for (int i = 0; i < N; ++i) {
      Trajectory tr = sample_trajectory(p, pi, rng);
      if (tr.steps[0] == std::make_pair(0, 0)) ++hits;
    }
    double mean = qa[s.pair_index(0, 0)];
    double sigma = std::sqrt(mean * (1.0 - mean) / N);
    CHECK(std::abs(static_cast<double>(hits) / N - mean) <= 3.0 * sigma);
  }
}

TEST_CASE("cast_loop_free") {
  // Two original states, full kernel; start at 0.
  std::vector<std::vector<std::vector<double>>> trans = {
      {{0.6, 0.4}, {0.1, 0.9}},
      {{0.5, 0.5}, {0.8, 0.2}},
  };
  SUBCASE("layer sizes are 1, |X|, ..., |X|, 1") {
    LoopFreeCmdp p = cast_loop_free(2, 2, trans, 0, 3);
    CHECK(p.shape.layers.size() == 4);
    CHECK(p.shape.layers[0].size() == 1);
    CHECK(p.shape.layers[1].size() == 2);
    CHECK(p.shape.layers[2].size() == 2);
    CHECK(p.shape.layers[3].size() == 1);
  }
  SUBCASE("horizon below one is rejected") {
    CHECK_THROWS_AS(cast_loop_free(2, 2, trans, 0, 0), ValidationError);
  }
  SUBCASE("occupancy of (x,k) equals the original chain's step marginal") {
    std::vector<std::vector<std::vector<double>>> trans3 = {
        {{0.2, 0.3, 0.5}, {0.6, 0.2, 0.2}},
        {{0.1, 0.8, 0.1}, {0.3, 0.3, 0.4}},
        {{0.4, 0.4, 0.2}, {0.25, 0.5, 0.25}},
    };
    LoopFreeCmdp p = cast_loop_free(3, 2, trans3, 1, 4);
    // Stationary randomized action choice 0.7/0.3 in both representations.
    Policy pi;
    pi.probs.assign(p.shape.total_pairs, 0.0);
    for (int x = 0; x < p.shape.num_states(); ++x) {
      if (p.shape.is_terminal(x)) continue;
      pi.probs[p.shape.pair_index(x, 0)] = 0.7;
      pi.probs[p.shape.pair_index(x, 1)] = 0.3;
    }
    OccupancyMeasure q = induce_occupancy(p, pi);
    std::vector<double> mass = state_marginal(p.shape, q.triple);
    // Forward probabilities in the original chain under the mixed kernel.
    std::vector<double> dist = {0.0, 1.0, 0.0};
    for (int k = 1; k < 4; ++k) {
      std::vector<double> next(3, 0.0);
      for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y)
          next[y] += dist[x] * (0.7 * trans3[x][0][y] + 0.3 * trans3[x][1][y]);
      dist = next;
      if (k < 4 - 1 + 1 && k <= 2) {
        for (int y = 0; y < 3; ++y) {
          int layered = p.shape.layers[k][y];
          CHECK(mass[layered] == doctest::Approx(dist[y]).epsilon(1e-12));
        }
      }
    }
  }
  SUBCASE("already-layered input keeps its occupancy structure") {
    // A 2-state chain cast twice: occupancies of reachable copies agree.
    LoopFreeCmdp p1 = cast_loop_free(2, 2, trans, 0, 2);
    Policy pi1;
    pi1.probs.assign(p1.shape.total_pairs, 0.5);
    OccupancyMeasure q1 = induce_occupancy(p1, pi1);
    std::vector<double> m1 = state_marginal(p1.shape, q1.triple);
    // Same chain expressed directly as layers.
    LoopFreeCmdp p2;
    p2.shape = LayerLayout({1, 2, 1}, 2);
    p2.kernel.assign(p2.shape.total_triples, 0.0);
    for (int a = 0; a < 2; ++a) {
      for (int y = 0; y < 2; ++y)
        p2.kernel[p2.shape.triple_index(0, a, 1 + y)] = trans[0][a][y];
      for (int x = 0; x < 2; ++x)
        p2.kernel[p2.shape.triple_index(1 + x, a, 3)] = 1.0;
    }
    Policy pi2;
    pi2.probs.assign(p2.shape.total_pairs, 0.5);
    OccupancyMeasure q2 = induce_occupancy(p2, pi2);
    std::vector<double> m2 = state_marginal(p2.shape, q2.triple);
    for (int y = 0; y < 2; ++y)
      CHECK(m1[p1.shape.layers[1][y]] ==
            doctest::Approx(m2[p2.shape.layers[1][y]]).epsilon(1e-12));
  }
}

TEST_CASE("pair lift preserves inner products against occupancies") {
  LoopFreeCmdp p = fixtures::t1_noisy_cmdp();
  const LayerLayout& s = p.shape;
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> v(s.total_pairs);
    for (double& x : v) x = 2.0 * next_uniform(rng) - 1.0;
    Policy pi;
    pi.probs.assign(s.total_pairs, 0.5);
    OccupancyMeasure q = induce_occupancy(p, pi);
    std::vector<double> lifted = lift_pair_vector(s, v);
    double direct = 0.0;
    for (int i = 0; i < s.total_triples; ++i) direct += lifted[i] * q.triple[i];
    CHECK(direct == doctest::Approx(pair_dot(s, v, q.triple)).epsilon(1e-12));
  }
}
